#pragma once

#include <memory>

#include "sigt/model/baselines.hpp"
#include "sigt/model/sigt.hpp"

namespace sigt {

std::unique_ptr<Model> make_model(const FrameConfig& frame, const ModelConfig& cfg);

}  // namespace sigt
