#include "autostpp/train/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "autostpp/errors.hpp"
#include "autostpp/io.hpp"
#include "autostpp/prodnet/prodsum.hpp"

namespace autostpp::train {

void TrainConfig::validate() const {
  auto check_lr = [](double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("learning rate must be positive");
  };
  check_lr(lr);
  for (double v : lr_grid) check_lr(v);
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw DomainError("Adam betas must lie in [0, 1)");
  }
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  if (!(clip_norm >= 0.0)) throw DomainError("clip_norm must be >= 0");
  if (batch < 1) throw DomainError("batch must be >= 1");
  if (n_prodnets < 1) throw DomainError("n_prodnets must be >= 1");
  if (n_windows < 1) throw DomainError("n_windows must be >= 1");
  factor_spec().validate();
}

autoint::MlpSpec TrainConfig::factor_spec() const {
  autoint::MlpSpec spec = prodnet::ProdSum::default_factor_spec();
  spec.widths = {1};
  for (auto h : hidden) spec.widths.push_back(h);
  spec.widths.push_back(1);
  spec.activation = autoint::Activation::from_name(activation);
  return spec;
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"lr", c.lr},
                     {"lr_grid", c.lr_grid},
                     {"beta1", c.beta1},
                     {"beta2", c.beta2},
                     {"eps", c.eps},
                     {"clip_norm", c.clip_norm},
                     {"epochs", c.epochs},
                     {"batch", c.batch},
                     {"n_prodnets", c.n_prodnets},
                     {"hidden", c.hidden},
                     {"activation", c.activation},
                     {"window", c.window},
                     {"n_windows", c.n_windows},
                     {"freeze_influence", c.freeze_influence},
                     {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  if (!j.is_object()) throw DataError("training config must be a JSON object");
  const nlohmann::json known = TrainConfig{};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw DataError("unknown training config key '" + key + "'");
  }
  nlohmann::json merged = known;
  merged.update(j);
  try {
    c.lr = merged.at("lr").get<double>();
    c.lr_grid = merged.at("lr_grid").get<std::vector<double>>();
    c.beta1 = merged.at("beta1").get<double>();
    c.beta2 = merged.at("beta2").get<double>();
    c.eps = merged.at("eps").get<double>();
    c.clip_norm = merged.at("clip_norm").get<double>();
    c.epochs = merged.at("epochs").get<std::size_t>();
    c.batch = merged.at("batch").get<std::size_t>();
    c.n_prodnets = merged.at("n_prodnets").get<std::size_t>();
    c.hidden = merged.at("hidden").get<std::vector<std::size_t>>();
    c.activation = merged.at("activation").get<std::string>();
    c.window = merged.at("window").get<std::size_t>();
    c.n_windows = merged.at("n_windows").get<std::size_t>();
    c.freeze_influence = merged.at("freeze_influence").get<bool>();
    c.seed = merged.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid training config: ") + e.what());
  }
}

void apply_env_overrides(nlohmann::json& config, const EnvLookup& getenv) {
  const nlohmann::json known = TrainConfig{};
  for (const auto& [key, value] : known.items()) {
    std::string name = "AUTOSTPP_";
    for (char ch : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    const char* raw = getenv(name.c_str());
    if (!raw) continue;
    nlohmann::json parsed = nlohmann::json::parse(raw, nullptr, false);
    config[key] = parsed.is_discarded() ? nlohmann::json(raw) : parsed;
  }
}

void apply_env_overrides(nlohmann::json& config) {
  apply_env_overrides(config, [](const char* name) { return std::getenv(name); });
}

TrainConfig load_config(const std::string& path) {
  nlohmann::json j = nlohmann::json::object();
  if (!path.empty()) j = read_json(path);
  apply_env_overrides(j);
  TrainConfig c = j.get<TrainConfig>();
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw DataError(std::string("invalid training config: ") + e.what());
  }
  return c;
}

}  // namespace autostpp::train
