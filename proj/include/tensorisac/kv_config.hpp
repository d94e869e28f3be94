// SPDX-License-Identifier: Apache-2.0
//
// tensorisac - tensor-based channel and target parameter estimation
// for massive MIMO integrated sensing and communication
// Copyright (C) 2026 the tensorisac contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Flat key = value experiment configs: parsing, schema application onto a
// SweepConfig, and the documented schema text. The format is line-oriented
// so config files diff cleanly in review.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tensorisac/sweep.hpp"

namespace tisac
{

/// A parsed config file: keys in file order with their raw string values.
/// Comments ('#' to end of line), blank lines, and surrounding whitespace
/// are already stripped. Duplicate keys are rejected at parse time.
struct KvFile
{
    std::vector<std::pair<std::string, std::string>> entries;
    std::string origin; ///< path or label used in error messages
};

/// Parse `key = value` lines from text. `origin` names the source in
/// diagnostics. Throws std::invalid_argument on malformed lines, empty
/// keys/values, or duplicate keys.
KvFile parse_kv_text(const std::string &text, const std::string &origin);

/// Read and parse a config file; std::invalid_argument if unreadable.
KvFile parse_kv_file(const std::string &path);

/// Apply the schema onto defaults and validate the result. Every key is
/// optional; unknown keys are rejected with the full list of offenders.
/// When `scatterers` is omitted it follows `problem` (sensing -> targets,
/// channel -> multipaths).
SweepConfig sweep_config_from_kv(const KvFile &kv);

/// Human-readable schema: one line per key with type, default, and meaning.
std::string kv_schema();

} // namespace tisac
