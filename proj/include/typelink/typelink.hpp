// Copyright 2026 The Typelink Authors.
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

// Everything except the HTTP layer (typelink/http.hpp).

#ifndef TYPELINK_TYPELINK_HPP_
#define TYPELINK_TYPELINK_HPP_

#include "typelink/base.hpp"
#include "typelink/corpus.hpp"
#include "typelink/evalcore.hpp"
#include "typelink/kg.hpp"
#include "typelink/learnability.hpp"
#include "typelink/linker.hpp"
#include "typelink/search.hpp"
#include "typelink/service.hpp"
#include "typelink/simplify.hpp"
#include "typelink/synth.hpp"
#include "typelink/typeclf.hpp"
#include "typelink/typesys.hpp"

#endif  // TYPELINK_TYPELINK_HPP_
