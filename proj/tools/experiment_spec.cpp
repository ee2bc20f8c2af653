#include "experiment_spec.hpp"

#include <charconv>
#include <map>

#include "rgg/errors.hpp"

namespace rggtool {

namespace {

const std::map<std::string, json>& command_table() {
  static const std::map<std::string, json> table{
      {"calibrate", {{"method", "empirical_quantile"}, {"sample_budget", 2'000'000}, {"validation_budget", 2'000'000}}},
      {"sample", {{"stream", 0}, {"tau", nullptr}, {"write_positions", false}}},
      {"triangle-test", {{"trials", 100}, {"scale", 1.0}, {"input", nullptr}, {"calibration_budget", 2'000'000}}},
      {"sweep-power",
       {{"d_values", json::array({16, 64, 256, 1024})},
        {"trials", 100},
        {"scale", 1.0},
        {"calibration_budget", 2'000'000},
        {"shuffled_control", false}}},
      {"spectrum", {{"stream", 0}, {"tau", nullptr}, {"input", nullptr}, {"a", json::array({1.0, 2.0, 4.0})}}},
      {"arc-vectors", {{"stream", 0}, {"tau", nullptr}, {"half_width", nullptr}}},
      {"core-contract", {{"input", nullptr}, {"walk", nullptr}}},
      {"trace-moment", {{"m_values", json::array({2, 4})}, {"trials", 20}, {"gnp", false}, {"stream", 0}}},
      {"moments", {{"k", 3}, {"d_values", json::array({64, 256, 1024})}, {"mc_samples", 1'000'000}}},
      {"tv-bound", {{"k_max", 6}, {"trials", 10'000}, {"inner_samples", 1000}, {"stream", 0}}},
  };
  return table;
}

rgg::Norm norm_from_json(const json& v) {
  if (v.is_number_integer()) return rgg::Norm::lq(v.get<int>());
  if (v.is_string()) return rgg::Norm::parse(v.get<std::string>());
  throw rgg::InvalidArgument("model.norm must be an integer q or \"inf\"");
}

void apply_model(rgg::ModelConfig& m, const json& src, const char* where) {
  if (!src.is_object()) throw rgg::InvalidArgument(std::string(where) + ": model must be an object");
  for (const auto& [key, v] : src.items()) {
    if (key == "n") m.n = v.get<std::size_t>();
    else if (key == "d") m.d = v.get<std::size_t>();
    else if (key == "p") m.p = v.get<double>();
    else if (key == "norm") m.norm = norm_from_json(v);
    else if (key == "master_seed") m.master_seed = v.get<std::uint64_t>();
    else throw rgg::InvalidArgument(std::string(where) + ": unknown model field '" + key + "'");
  }
}

void apply_params(json& params, const json& src, const std::string& command, const char* where) {
  if (!src.is_object()) throw rgg::InvalidArgument(std::string(where) + ": params must be an object");
  for (const auto& [key, v] : src.items()) {
    if (!params.contains(key))
      throw rgg::InvalidArgument(std::string(where) + ": unknown parameter '" + key + "' for " + command);
    params[key] = v;
  }
}

}  // namespace

json default_params(const std::string& command) {
  const auto& table = command_table();
  const auto it = table.find(command);
  if (it == table.end()) throw rgg::InvalidArgument("unknown command '" + command + "'");
  return it->second;
}

json model_to_json(const rgg::ModelConfig& model) {
  json norm = model.norm.is_infinite() ? json("inf") : json(model.norm.q());
  return {{"n", model.n}, {"d", model.d}, {"p", model.p}, {"norm", norm}, {"master_seed", model.master_seed}};
}

json ExperimentSpec::to_json() const {
  return {{"command", command}, {"model", model_to_json(model)}, {"params", params}, {"output_dir", output_dir}};
}

ExperimentSpec ExperimentSpec::from_json(const json& j) {
  ExperimentSpec s;
  s.command = j.at("command").get<std::string>();
  s.params = default_params(s.command);
  if (j.contains("model")) apply_model(s.model, j.at("model"), "spec");
  if (j.contains("params")) apply_params(s.params, j.at("params"), s.command, "spec");
  if (j.contains("output_dir")) s.output_dir = j.at("output_dir").get<std::string>();
  return s;
}

ExperimentSpec resolve_spec(const std::optional<std::string>& command, const json& config, const json& model_flags,
                            const json& param_flags, const char* seed_env) {
  for (const auto& [key, v] : config.items())
    if (key != "command" && key != "model" && key != "params" && key != "output_dir")
      throw rgg::InvalidArgument("config: unknown field '" + key + "'");
  ExperimentSpec s;
  if (command) s.command = *command;
  else if (config.contains("command")) s.command = config.at("command").get<std::string>();
  else throw rgg::InvalidArgument("no command given");
  if (config.contains("command") && config.at("command").get<std::string>() != s.command)
    throw rgg::InvalidArgument("config command '" + config.at("command").get<std::string>() +
                               "' conflicts with '" + s.command + "'");
  s.params = default_params(s.command);
  if (config.contains("model")) apply_model(s.model, config.at("model"), "config");
  if (config.contains("params")) apply_params(s.params, config.at("params"), s.command, "config");
  if (config.contains("output_dir")) s.output_dir = config.at("output_dir").get<std::string>();
  if (seed_env != nullptr && *seed_env != '\0') {
    const std::string text(seed_env);
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (ec != std::errc{} || ptr != text.data() + text.size())
      throw rgg::InvalidArgument("RGG_SEED must be an unsigned 64-bit integer, got '" + text + "'");
    s.model.master_seed = seed;
  }
  apply_model(s.model, model_flags, "flags");
  apply_params(s.params, param_flags, s.command, "flags");
  s.model.validate();
  return s;
}

}  // namespace rggtool
