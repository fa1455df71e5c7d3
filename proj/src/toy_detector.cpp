/**
 * Copyright 2026 The ttaforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "ttaforge/toy_detector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "ttaforge/error.hpp"
#include "ttaforge/rng.hpp"

namespace ttaforge {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

Matrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols, double stddev) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = static_cast<double>(static_cast<float>(normal(rng, 0.0, stddev)));
  return m;
}

// Solves (A) x = b for symmetric positive definite A via Cholesky. A is
// consumed.
std::vector<double> solve_spd(Matrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= a(j, k) * a(j, k);
    if (!(diag > 0.0)) throw Error("solve_spd: matrix not positive definite");
    a(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= a(i, k) * a(j, k);
      a(i, j) = v / a(j, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= a(i, k) * b[k];
    b[i] = v / a(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double v = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) v -= a(k, ii) * b[k];
    b[ii] = v / a(ii, ii);
  }
  return b;
}

// Canonical target order makes every reduction below independent of the
// caller's list order.
std::vector<Target> canonical(std::span<const Target> targets) {
  std::vector<Target> out(targets.begin(), targets.end());
  std::sort(out.begin(), out.end(), [](const Target& a, const Target& b) {
    return std::tie(a.box.x1, a.box.y1, a.box.x2, a.box.y2, a.category, a.weight) <
           std::tie(b.box.x1, b.box.y1, b.box.x2, b.box.y2, b.category, b.weight);
  });
  return out;
}

}  // namespace

struct ToyDetector::Trace {
  int grid_h = 0;
  int grid_w = 0;
  std::vector<Matrix> pre_activation;  // image rows of x W + b, per layer
  std::vector<std::size_t> mixed_rows;  // prompt rows + image rows, per layer
  Matrix encoded;                       // n x d
  Matrix text;                          // |C| x d
  Matrix logits;                        // n x |C|
  Matrix loc_raw;                       // n x 4
};

ToyDetector::ToyDetector(CategorySpace categories, ToyDetectorOptions options)
    : categories_(std::move(categories)), options_(options) {
  if (options_.patch <= 0 || options_.dim <= 0 || options_.layers <= 0) {
    throw ConfigError("ToyDetector: patch, dim and layers must be positive");
  }
  if (categories_.size() == 0) throw ConfigError("ToyDetector: empty category space");
  Rng rng(mix_seed(options_.seed, 0));
  const auto d = static_cast<std::size_t>(options_.dim);
  const auto patch_len = static_cast<std::size_t>(3 * options_.patch * options_.patch);
  weights_.patch_proj = gaussian_matrix(rng, patch_len, d, 1.0 / std::sqrt(static_cast<double>(patch_len)));
  for (int l = 0; l < options_.layers; ++l) {
    weights_.layer_weight.push_back(gaussian_matrix(rng, d, d, std::sqrt(2.0 / static_cast<double>(d))));
    weights_.layer_bias.push_back(gaussian_matrix(rng, 1, d, 0.1));
  }
  weights_.class_embedding = gaussian_matrix(rng, categories_.size(), d, 1.0);
  weights_.loc_head = gaussian_matrix(rng, d, 4, 0.1 / std::sqrt(static_cast<double>(d)));
}

ToyDetector::ToyDetector(CategorySpace categories, ToyDetectorOptions options, ToyWeights weights)
    : categories_(std::move(categories)), options_(options), weights_(std::move(weights)) {}

ToyDetector ToyDetector::pretrained(CategorySpace categories, ToyDetectorOptions options,
                                    std::span<const LabeledImage> source, const HeadFitOptions& fit) {
  ToyDetector det(std::move(categories), options);
  det.fit_heads(source, fit);
  return det;
}

TensorContainer ToyDetector::to_container() const {
  TensorContainer c;
  c.seed = options_.seed;
  c.sections.push_back({"W0", weights_.patch_proj});
  for (std::size_t l = 0; l < weights_.layer_weight.size(); ++l) {
    c.sections.push_back({"W" + std::to_string(l + 1), weights_.layer_weight[l]});
    c.sections.push_back({"b" + std::to_string(l + 1), weights_.layer_bias[l]});
  }
  c.sections.push_back({"T", weights_.class_embedding});
  c.sections.push_back({"Wloc", weights_.loc_head});
  return c;
}

void ToyDetector::save(const std::filesystem::path& path) const { write_container(path, to_container()); }

ToyDetector ToyDetector::load(const std::filesystem::path& path, CategorySpace categories,
                              kernels::Execution execution) {
  const TensorContainer c = read_container(path);
  ToyWeights w;
  w.patch_proj = c.at("W0");
  const auto patch_len = w.patch_proj.rows();
  const int patch = static_cast<int>(std::lround(std::sqrt(static_cast<double>(patch_len) / 3.0)));
  if (patch <= 0 || static_cast<std::size_t>(3 * patch * patch) != patch_len) {
    throw FormatError(path.string() + ": W0 rows are not 3*P*P");
  }
  const std::size_t d = w.patch_proj.cols();
  for (int l = 1;; ++l) {
    const std::string tag = "W" + std::to_string(l);
    const bool present = std::any_of(c.sections.begin(), c.sections.end(), [&](const auto& s) { return s.tag == tag; });
    if (!present) break;
    w.layer_weight.push_back(c.at(tag));
    w.layer_bias.push_back(c.at("b" + std::to_string(l)));
    if (w.layer_weight.back().rows() != d || w.layer_weight.back().cols() != d || w.layer_bias.back().cols() != d) {
      throw FormatError(path.string() + ": layer " + std::to_string(l) + " shape mismatch");
    }
  }
  w.class_embedding = c.at("T");
  w.loc_head = c.at("Wloc");
  if (w.layer_weight.empty()) throw FormatError(path.string() + ": no encoder layers");
  if (w.class_embedding.rows() != categories.size() || w.class_embedding.cols() != d) {
    throw FormatError(path.string() + ": class embeddings do not match the category space");
  }
  if (w.loc_head.rows() != d || w.loc_head.cols() != 4) throw FormatError(path.string() + ": Wloc shape mismatch");
  ToyDetectorOptions opts;
  opts.patch = patch;
  opts.dim = static_cast<int>(d);
  opts.layers = static_cast<int>(w.layer_weight.size());
  opts.seed = c.seed;
  opts.execution = execution;
  return ToyDetector(std::move(categories), opts, std::move(w));
}

void ToyDetector::check_image(const Image& image) const {
  const int p = options_.patch;
  if (image.empty() || image.height() % p != 0 || image.width() % p != 0) {
    throw ShapeError("ToyDetector: image " + std::to_string(image.height()) + "x" + std::to_string(image.width()) +
                     " is not a multiple of patch size " + std::to_string(p));
  }
}

void ToyDetector::check_prompts(const PromptSet& prompts) const {
  const auto d = static_cast<std::size_t>(options_.dim);
  if (prompts.text.rows() != categories_.size() || prompts.text.cols() != d) {
    throw ShapeError("ToyDetector: text prompt must be |C| x d");
  }
  if (prompts.visual.size() != num_layers()) throw ShapeError("ToyDetector: need one visual prompt block per layer");
  for (const auto& v : prompts.visual) {
    if (v.cols() != d || v.rows() != prompts.prompt_count()) throw ShapeError("ToyDetector: visual prompt shape");
  }
}

Matrix ToyDetector::tokenize(const Image& image) const {
  check_image(image);
  const int p = options_.patch;
  const int gh = image.height() / p;
  const int gw = image.width() / p;
  Matrix patches(static_cast<std::size_t>(gh * gw), static_cast<std::size_t>(3 * p * p));
  for (int gy = 0; gy < gh; ++gy) {
    for (int gx = 0; gx < gw; ++gx) {
      auto row = patches.row(static_cast<std::size_t>(gy * gw + gx));
      std::size_t i = 0;
      for (int py = 0; py < p; ++py) {
        for (int px = 0; px < p; ++px) {
          for (int c = 0; c < Image::kChannels; ++c) row[i++] = image.at(gy * p + py, gx * p + px, c);
        }
      }
    }
  }
  Matrix tokens;
  kernels::affine(options_.execution, patches, weights_.patch_proj, {}, tokens);
  return tokens;
}

namespace {

// One encoder layer. Prompt rows only enter through the global mean, since
// their own outputs are discarded.
Matrix run_layer(kernels::Execution exec, const Matrix& w, const Matrix& b, const Matrix& tokens, const Matrix& prompt,
                 Matrix* pre_activation) {
  Matrix pre;
  kernels::affine(exec, tokens, w, b.row(0), pre);
  const auto prompt_sum = kernels::column_sum(exec, prompt);
  const auto token_sum = kernels::column_sum(exec, tokens);
  const double rows = static_cast<double>(prompt.rows() + tokens.rows());
  Matrix out(tokens.rows(), tokens.cols());
  for (std::size_t r = 0; r < tokens.rows(); ++r) {
    for (std::size_t c = 0; c < tokens.cols(); ++c) {
      const double mean = (prompt.rows() == 0 ? token_sum[c] : prompt_sum[c] + token_sum[c]) / rows;
      out(r, c) = std::max(pre(r, c), 0.0) + mean;
    }
  }
  if (pre_activation != nullptr) *pre_activation = std::move(pre);
  return out;
}

}  // namespace

Matrix ToyDetector::encode_layer(std::size_t layer, const Matrix& tokens, const Matrix& prompt) const {
  if (layer >= num_layers()) throw ShapeError("encode_layer: layer index out of range");
  const auto d = static_cast<std::size_t>(options_.dim);
  if (tokens.cols() != d) throw ShapeError("encode_layer: token dimension mismatch");
  if (prompt.cols() != d && !(prompt.rows() == 0)) throw ShapeError("encode_layer: prompt dimension mismatch");
  const Matrix empty(0, d);
  return run_layer(options_.execution, weights_.layer_weight[layer], weights_.layer_bias[layer], tokens,
                   prompt.rows() == 0 ? empty : prompt, nullptr);
}

Matrix ToyDetector::encode(const Matrix& tokens, std::span<const Matrix> visual) const {
  if (visual.size() != num_layers()) throw ShapeError("encode: need one visual prompt block per layer");
  Matrix x = tokens;
  for (std::size_t l = 0; l < num_layers(); ++l) x = encode_layer(l, x, visual[l]);
  return x;
}

Matrix ToyDetector::text_embed(const Matrix& text_prompt) const {
  require_same_shape(text_prompt, weights_.class_embedding, "text_embed");
  Matrix out = weights_.class_embedding;
  auto dst = out.values();
  const auto src = text_prompt.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  return out;
}

ToyDetector::Trace ToyDetector::forward(const Image& image, const PromptSet& prompts) const {
  check_prompts(prompts);
  Trace t;
  t.grid_h = image.height() / options_.patch;
  t.grid_w = image.width() / options_.patch;
  Matrix x = tokenize(image);
  t.pre_activation.resize(num_layers());
  for (std::size_t l = 0; l < num_layers(); ++l) {
    t.mixed_rows.push_back(prompts.visual[l].rows() + x.rows());
    x = run_layer(options_.execution, weights_.layer_weight[l], weights_.layer_bias[l], x, prompts.visual[l],
                  &t.pre_activation[l]);
  }
  t.encoded = std::move(x);
  t.text = text_embed(prompts.text);
  kernels::matmul_nt(options_.execution, t.encoded, t.text, t.logits);
  const double scale = 1.0 / std::sqrt(static_cast<double>(options_.dim));
  for (double& v : t.logits.values()) v *= scale;
  kernels::affine(options_.execution, t.encoded, weights_.loc_head, {}, t.loc_raw);
  return t;
}

BoundingBox ToyDetector::patch_box(std::size_t k, int grid_w) const {
  const double p = options_.patch;
  const auto gx = static_cast<double>(k % static_cast<std::size_t>(grid_w));
  const auto gy = static_cast<double>(k / static_cast<std::size_t>(grid_w));
  return {gx * p, gy * p, (gx + 1.0) * p, (gy + 1.0) * p};
}

int ToyDetector::assign_token(const BoundingBox& box, int grid_h, int grid_w) const {
  int best = -1;
  double best_iou = 0.0;
  const auto n = static_cast<std::size_t>(grid_h * grid_w);
  for (std::size_t k = 0; k < n; ++k) {
    const double v = iou(patch_box(k, grid_w), box);
    if (v > best_iou) {
      best_iou = v;
      best = static_cast<int>(k);
    }
  }
  return best;
}

std::vector<Detection> ToyDetector::predict(const Image& image, const PromptSet& prompts) const {
  const Trace t = forward(image, prompts);
  const double p = options_.patch;
  const std::size_t n = t.encoded.rows();
  std::vector<Detection> dets;
  dets.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> scores(categories_.size());
    for (std::size_t c = 0; c < scores.size(); ++c) scores[c] = sigmoid(t.logits(k, c));
    const BoundingBox cell = patch_box(k, t.grid_w);
    const double o0 = std::tanh(t.loc_raw(k, 0));
    const double o1 = std::tanh(t.loc_raw(k, 1));
    const double o2 = std::tanh(t.loc_raw(k, 2));
    const double o3 = std::tanh(t.loc_raw(k, 3));
    const BoundingBox box = BoundingBox::from_center(cell.center_x() + o0 * p, cell.center_y() + o1 * p,
                                                     p * std::exp(o2), p * std::exp(o3));
    dets.push_back(Detection::from_scores(clamp_box(box, image), std::move(scores)));
  }
  std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) { return a.score > b.score; });
  return dets;
}

LossResult ToyDetector::loss_and_grad(const Image& image, std::span<const Target> targets,
                                      const PromptSet& prompts) const {
  const Trace t = forward(image, prompts);
  const auto exec = options_.execution;
  const std::size_t n = t.encoded.rows();
  const std::size_t num_classes = categories_.size();
  const double p = options_.patch;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(options_.dim));

  // Indicator and per-pair weight of the classification term.
  Matrix indicator(n, num_classes, 0.0);
  Matrix pair_weight(n, num_classes, 1.0);
  struct Assignment {
    std::size_t token;
    Target target;
  };
  std::vector<Assignment> assigned;
  for (const Target& tg : canonical(targets)) {
    if (!tg.box.valid()) throw ShapeError("loss_and_grad: invalid target box");
    if (tg.category < 0 || static_cast<std::size_t>(tg.category) >= num_classes) {
      throw ShapeError("loss_and_grad: target category out of range");
    }
    const int k = assign_token(tg.box, t.grid_h, t.grid_w);
    if (k < 0) continue;
    const auto tok = static_cast<std::size_t>(k);
    const auto c = static_cast<std::size_t>(tg.category);
    pair_weight(tok, c) = indicator(tok, c) == 0.0 ? tg.weight : std::max(pair_weight(tok, c), tg.weight);
    indicator(tok, c) = 1.0;
    assigned.push_back({tok, tg});
  }

  LossResult result;
  result.assigned = assigned.size();

  const double cls_norm = 1.0 / static_cast<double>(n * num_classes);
  Matrix grad_logits(n, num_classes);
  double loss_cls = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t c = 0; c < num_classes; ++c) {
      const double z = t.logits(k, c);
      const double y = indicator(k, c);
      const double w = pair_weight(k, c);
      loss_cls += w * (softplus(z) - y * z);
      grad_logits(k, c) = w * (sigmoid(z) - y) * cls_norm;
    }
  }
  result.loss_cls = loss_cls * cls_norm;

  Matrix grad_loc(n, 4, 0.0);
  double loss_loc = 0.0;
  if (!assigned.empty()) {
    const double loc_norm = 1.0 / (4.0 * static_cast<double>(assigned.size()));
    for (const auto& a : assigned) {
      const BoundingBox cell = patch_box(a.token, t.grid_w);
      std::array<double, 4> o{};
      for (std::size_t j = 0; j < 4; ++j) o[j] = std::tanh(t.loc_raw(a.token, j));
      const std::array<double, 4> pred{cell.center_x() / p + o[0], cell.center_y() / p + o[1], std::exp(o[2]),
                                       std::exp(o[3])};
      const std::array<double, 4> want{a.target.box.center_x() / p, a.target.box.center_y() / p,
                                       a.target.box.width() / p, a.target.box.height() / p};
      const std::array<double, 4> dpred_do{1.0, 1.0, pred[2], pred[3]};
      for (std::size_t j = 0; j < 4; ++j) {
        const double diff = pred[j] - want[j];
        loss_loc += a.target.weight * std::abs(diff) * loc_norm;
        grad_loc(a.token, j) += a.target.weight * sign(diff) * loc_norm * dpred_do[j] * (1.0 - o[j] * o[j]);
      }
    }
  }
  result.loss_loc = loss_loc;
  if (!std::isfinite(result.total())) throw NonFiniteLoss("loss_and_grad: non-finite loss");

  // d/dE~ and d/dS of the scaled dot-product head.
  result.grad = prompts.zeros_like();
  kernels::matmul_tn(exec, grad_logits, t.encoded, result.grad.text);
  for (double& v : result.grad.text.values()) v *= inv_sqrt_d;

  Matrix grad_encoded;
  kernels::affine(exec, grad_logits, t.text, {}, grad_encoded);
  for (double& v : grad_encoded.values()) v *= inv_sqrt_d;
  Matrix grad_from_loc;
  kernels::matmul_nt(exec, grad_loc, weights_.loc_head, grad_from_loc);
  for (std::size_t i = 0; i < grad_encoded.size(); ++i) grad_encoded.values()[i] += grad_from_loc.values()[i];

  // Encoder layers, last to first. out = relu(pre) + mean(prompt rows ++ token rows).
  Matrix grad = std::move(grad_encoded);
  for (std::size_t l = num_layers(); l-- > 0;) {
    const auto gsum = kernels::column_sum(exec, grad);
    const double inv_rows = 1.0 / static_cast<double>(t.mixed_rows[l]);
    Matrix& gp = result.grad.visual[l];
    for (std::size_t r = 0; r < gp.rows(); ++r) {
      for (std::size_t c = 0; c < gp.cols(); ++c) gp(r, c) = gsum[c] * inv_rows;
    }
    if (l == 0) break;
    Matrix grad_pre = grad;
    const Matrix& pre = t.pre_activation[l];
    for (std::size_t i = 0; i < grad_pre.size(); ++i) {
      if (!(pre.values()[i] > 0.0)) grad_pre.values()[i] = 0.0;
    }
    Matrix grad_in;
    kernels::matmul_nt(exec, grad_pre, weights_.layer_weight[l], grad_in);
    for (std::size_t r = 0; r < grad_in.rows(); ++r) {
      for (std::size_t c = 0; c < grad_in.cols(); ++c) grad_in(r, c) += gsum[c] * inv_rows;
    }
    grad = std::move(grad_in);
  }
  return result;
}

void ToyDetector::fit_heads(std::span<const LabeledImage> source, const HeadFitOptions& fit) {
  if (source.empty()) throw ConfigError("fit_heads: no source images");
  const auto d = static_cast<std::size_t>(options_.dim);
  const std::size_t num_classes = categories_.size();
  const PromptSet none = zero_prompts(0);
  const double p = options_.patch;

  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  std::vector<std::vector<double>> loc_features;
  std::vector<std::array<double, 4>> loc_targets;
  for (const auto& sample : source) {
    const Matrix x = encode(tokenize(sample.image), none.visual);
    const int gh = sample.image.height() / options_.patch;
    const int gw = sample.image.width() / options_.patch;
    std::vector<int> token_label(x.rows(), -1);
    for (const auto& obj : sample.objects) {
      const int k = assign_token(obj.box, gh, gw);
      if (k < 0) continue;
      token_label[static_cast<std::size_t>(k)] = obj.category;
      const BoundingBox cell = patch_box(static_cast<std::size_t>(k), gw);
      const std::array<double, 4> offset{(obj.box.center_x() - cell.center_x()) / p,
                                         (obj.box.center_y() - cell.center_y()) / p, std::log(obj.box.width() / p),
                                         std::log(obj.box.height() / p)};
      std::array<double, 4> raw{};
      for (std::size_t j = 0; j < 4; ++j) raw[j] = std::atanh(std::clamp(offset[j], -fit.offset_clip, fit.offset_clip));
      const auto row = x.row(static_cast<std::size_t>(k));
      loc_features.emplace_back(row.begin(), row.end());
      loc_targets.push_back(raw);
    }
    for (std::size_t k = 0; k < x.rows(); ++k) {
      const auto row = x.row(k);
      features.emplace_back(row.begin(), row.end());
      labels.push_back(token_label[k]);
    }
  }

  // Per-class weighted logistic regression without intercept (Newton steps).
  const double scale = std::sqrt(static_cast<double>(d));
  for (std::size_t c = 0; c < num_classes; ++c) {
    std::vector<double> u(d, 0.0);
    for (int it = 0; it < fit.newton_iterations; ++it) {
      Matrix hess(d, d, 0.0);
      std::vector<double> grad(d, 0.0);
      for (std::size_t i = 0; i < d; ++i) {
        hess(i, i) = fit.ridge;
        grad[i] = fit.ridge * u[i];
      }
      for (std::size_t s = 0; s < features.size(); ++s) {
        const auto& f = features[s];
        const double y = labels[s] == static_cast<int>(c) ? 1.0 : 0.0;
        const double w = y > 0.0 ? fit.positive_weight : 1.0;
        const double prob = sigmoid(std::inner_product(f.begin(), f.end(), u.begin(), 0.0));
        const double curv = w * prob * (1.0 - prob);
        for (std::size_t i = 0; i < d; ++i) {
          grad[i] += w * (prob - y) * f[i];
          for (std::size_t j = 0; j <= i; ++j) hess(i, j) += curv * f[i] * f[j];
        }
      }
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < i; ++j) hess(j, i) = hess(i, j);
      }
      const auto step = solve_spd(std::move(hess), grad);
      double change = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        u[i] -= step[i];
        change = std::max(change, std::abs(step[i]));
      }
      if (change < 1e-10) break;
    }
    for (std::size_t i = 0; i < d; ++i) weights_.class_embedding(c, i) = u[i] * scale;
  }

  // Ridge regression of the pre-tanh box offsets.
  if (!loc_features.empty()) {
    Matrix gram(d, d, 0.0);
    for (std::size_t i = 0; i < d; ++i) gram(i, i) = fit.ridge;
    for (const auto& f : loc_features) {
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) gram(i, j) += f[i] * f[j];
      }
    }
    for (std::size_t j = 0; j < 4; ++j) {
      std::vector<double> rhs(d, 0.0);
      for (std::size_t s = 0; s < loc_features.size(); ++s) {
        for (std::size_t i = 0; i < d; ++i) rhs[i] += loc_features[s][i] * loc_targets[s][j];
      }
      const auto col = solve_spd(gram, rhs);
      for (std::size_t i = 0; i < d; ++i) weights_.loc_head(i, j) = col[i];
    }
  }
  round_to_float(weights_.class_embedding);
  round_to_float(weights_.loc_head);
}

}  // namespace ttaforge
