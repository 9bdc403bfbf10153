#include "sigt/model/factory.hpp"

namespace sigt {

std::unique_ptr<Model> make_model(const FrameConfig& frame, const ModelConfig& cfg) {
  switch (cfg.kind) {
    case ModelKind::sigt: return std::make_unique<SigT>(frame, cfg);
    case ModelKind::fcdnn: return std::make_unique<FcDnn>(frame, cfg);
    case ModelKind::csinet: return std::make_unique<CsiNet>(frame, cfg);
    case ModelKind::lstm: return std::make_unique<LstmReceiver>(frame, cfg);
  }
  throw ConfigError("model: unknown kind");
}

}  // namespace sigt
