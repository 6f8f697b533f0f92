// SPDX-License-Identifier: Apache-2.0
//
// irsrobust: worst-case robust precoder / IRS reflection design
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


#ifndef IRSROBUST_HPP
#define IRSROBUST_HPP

#include "irsrobust/affine.hpp"
#include "irsrobust/channel.hpp"
#include "irsrobust/evaluation.hpp"
#include "irsrobust/lmi.hpp"
#include "irsrobust/optimizer.hpp"
#include "irsrobust/sdp.hpp"

#endif
