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
#pragma once

#include <stdexcept>
#include <string>

namespace ttaforge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor or image dimensions do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A box whose clamped, rounded extent covers less than one pixel.
class DegenerateBox : public Error {
 public:
  using Error::Error;
};

/// Loss evaluated to NaN or Inf; the prompts have diverged.
class NonFiniteLoss : public Error {
 public:
  using Error::Error;
};

/// Malformed file on disk (dataset, predictions, weights, config).
class FormatError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ttaforge
