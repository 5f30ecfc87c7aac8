/*
 Copyright 2026 The qcons Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef QCONS_QCONS_HPP
#define QCONS_QCONS_HPP

#include "qcons/closed_loop.hpp"
#include "qcons/codec.hpp"
#include "qcons/config.hpp"
#include "qcons/error.hpp"
#include "qcons/gains.hpp"
#include "qcons/model.hpp"
#include "qcons/network.hpp"
#include "qcons/numeric.hpp"
#include "qcons/quantizer.hpp"
#include "qcons/sim.hpp"
#include "qcons/spectral.hpp"

#endif  // QCONS_QCONS_HPP
