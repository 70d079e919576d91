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


// Trains a small CNN on the synthetic corpus and prints its learning curve.
//
//   synthetic_demo [examples] [epochs]

#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "sentclf/sentclf.hpp"

int main(int argc, char** argv) {
  using namespace sentclf;
  SyntheticOptions opt;
  opt.examples = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 2000;
  const int epochs = argc > 2 ? std::atoi(argv[2]) : 5;

  Dataset corpus = make_synthetic_corpus(opt, 42);
  SplitResult parts = split(corpus, 0.8, 42);

  RunConfig cfg;
  cfg.arch = Arch::kCnn;
  cfg.encoding = Encoding::kOneHot;
  cfg.dim = 1024;
  cfg.conv_out = 32;
  cfg.hidden = 32;
  cfg.epochs = epochs;
  cfg.batch = 32;
  cfg.lr = 0.05;

  TrainResult result = train_run(cfg, parts.train, parts.test, [](const CurveRecord& r) {
    std::printf("epoch %d  loss %.4f  accuracy %.4f\n", r.iteration, r.train_loss,
                r.test_accuracy);
  });
  std::cout << compare_table({{"cnn-onehot-1024", result.curve.best_accuracy()}});

  TokenSeq probe = tokenize("w1 cue_green cue_red cue_blue w7");
  std::cout << "probe -> " << result.model.labels[predict(result.model.params, result.model.encoder(probe))]
            << "\n";
  return 0;
}
