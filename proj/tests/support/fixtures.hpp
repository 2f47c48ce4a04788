// Copyright 2026 The ecamut Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ECAMUT_TESTS_FIXTURES_HPP
#define ECAMUT_TESTS_FIXTURES_HPP

#include <filesystem>
#include <string>

#include "ecamut/io.hpp"
#include "ecamut/model.hpp"
#include "ecamut/text.hpp"

namespace ecamut::testing {

// Basic web-server policy with irregular spacing and mixed case.
inline constexpr const char* kBasicPolicy =
    "when requestdensity is 'high' or 'medium'\n"
    "if cacheHandler.size  == 0 \n"
    "then utility of addCache is 'high'    \n"
    "\n"
    "when requestdensity is 'low'  \n"
    "if cacheHandler.size == 0  \n"
    "then utility of addCache is 'low'\n"
    "\n"
    "when LOAD is 'high'\n"
    "if FileServers.size  <= 10 \n"
    "then utility of addFileServer is 'high'  \n"
    "\n"
    "when LOAD is 'LOW'  \n"
    "if FileServers.size  <= 10 \n"
    "then utility of addFileServer is 'low'\n";

inline constexpr const char* kBasicCanonical =
    "when requestdensity is 'high' or 'medium'\n"
    "if cacheHandler.size == 0\n"
    "then utility of addCache is 'high'\n"
    "\n"
    "when requestdensity is 'low'\n"
    "if cacheHandler.size == 0\n"
    "then utility of addCache is 'low'\n"
    "\n"
    "when LOAD is 'high'\n"
    "if FileServers.size <= 10\n"
    "then utility of addFileServer is 'high'\n"
    "\n"
    "when LOAD is 'low'\n"
    "if FileServers.size <= 10\n"
    "then utility of addFileServer is 'low'\n";

inline constexpr const char* kWebSchema =
    "property LOAD : int [0,100] levels { low: [0,49], high: [50,100] }\n"
    "property requestdensity : int [0,100] levels { low: [0,33], medium: [34,66], high: [67,100] }\n";

inline constexpr const char* kWebSys =
    "state cacheHandler.size = 0\n"
    "state FileServers.size = 0\n"
    "effect addCache 'high' => cacheHandler.size := 1\n"
    "effect addFileServer 'high' => FileServers.size := FileServers.size + 1\n";

/// Two properties on [0,3] with binary levels.
inline constexpr const char* kShrunkSchema =
    "property LOAD : int [0,3] levels { low: [0,1], high: [2,3] }\n"
    "property requestdensity : int [0,3] levels { low: [0,1], high: [2,3] }\n";

/// Basic policy shape on the shrunk schema: 'medium' dropped, file-server bounds
/// brought within reach of three-step flows.
inline constexpr const char* kShrunkPolicy =
    "when requestdensity is 'high'\n"
    "if cacheHandler.size == 0\n"
    "then utility of addCache is 'high'\n"
    "\n"
    "when requestdensity is 'low'\n"
    "if cacheHandler.size == 0\n"
    "then utility of addCache is 'low'\n"
    "\n"
    "when LOAD is 'high'\n"
    "if FileServers.size < 1\n"
    "then utility of addFileServer is 'high'\n"
    "\n"
    "when LOAD is 'low'\n"
    "if FileServers.size <= 1\n"
    "then utility of addFileServer is 'low'\n";

inline Policy basic_policy() { return parse_policy(kBasicPolicy); }
inline ContextSchema web_schema() { return parse_schema(kWebSchema); }
inline SystemModel web_sys() { return parse_system_model(kWebSys); }

inline std::filesystem::path data_dir() { return ECAMUT_DATA_DIR; }

inline std::string data_file(const std::string& name) { return read_text_file(data_dir() / name); }

}  // namespace ecamut::testing

#endif  // ECAMUT_TESTS_FIXTURES_HPP
