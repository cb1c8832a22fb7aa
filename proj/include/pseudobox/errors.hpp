/*
 * Copyright 2026 The pseudobox Authors. All rights reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pseudobox
{

/// A parameter or configuration value violates its documented range.
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Inputs are individually valid but inconsistent with each other
/// (e.g. mask image size differs from the calibration image size).
class InputError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A file could not be parsed. `line()` is 1-based, 0 when not line-oriented.
class MalformedFileError : public std::runtime_error
{
public:
  MalformedFileError(const std::string & path, const std::string & what, std::size_t line = 0)
  : std::runtime_error(format(path, what, line)), path_(path), line_(line)
  {
  }

  const std::string & path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

private:
  static std::string format(const std::string & path, const std::string & what, std::size_t line)
  {
    std::string msg = path;
    if (line > 0) {
      msg += ":" + std::to_string(line);
    }
    return msg + ": " + what;
  }

  std::string path_;
  std::size_t line_;
};

class DegenerateClusterError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A proposal box contains no points, so its distribution score is undefined.
class EmptyForegroundError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class SceneTooDenseError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace pseudobox
