// Copyright 2026 The sentclf Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include "sentclf/checkpoint.hpp"
#include "sentclf/cnn.hpp"
#include "sentclf/config.hpp"
#include "sentclf/curve.hpp"
#include "sentclf/dataset.hpp"
#include "sentclf/embeddings.hpp"
#include "sentclf/errors.hpp"
#include "sentclf/fnn.hpp"
#include "sentclf/grad_check.hpp"
#include "sentclf/head.hpp"
#include "sentclf/inputs.hpp"
#include "sentclf/lstm.hpp"
#include "sentclf/model.hpp"
#include "sentclf/murmur3.hpp"
#include "sentclf/optim.hpp"
#include "sentclf/rnn.hpp"
#include "sentclf/tensor.hpp"
#include "sentclf/text.hpp"
#include "sentclf/trainer.hpp"
