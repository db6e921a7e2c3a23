// Copyright 2026 The QUSUM Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

#include "qusum/measurement.hpp"

namespace qusum {

// JSON file formats:
//   matrix:  {"dim": d, "re": [[...]], "im": [[...]]}
//   POVM:    {"dim": d, "elements": [{"re": [[...]], "im": [[...]]}, ...]}
//   channel: {"in_dim": a, "out_dim": b, "kraus": [{"re": [[...]], "im": [[...]]}, ...]}
// Loaders throw kIo when the file cannot be read and kParse on malformed content.

ComplexMatrix load_matrix_json(const std::string& path);
void save_matrix_json(const std::string& path, const ComplexMatrix& m);

Povm load_povm_json(const std::string& path);
void save_povm_json(const std::string& path, const Povm& m);
std::string povm_to_json_string(const Povm& m);
Povm povm_from_json_string(const std::string& text);

KrausChannel load_channel_json(const std::string& path);
void save_channel_json(const std::string& path, const KrausChannel& ch);

}  // namespace qusum
