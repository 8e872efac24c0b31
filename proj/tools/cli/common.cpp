#include "common.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

namespace deskcech::cli {

CLI::Option* Params::flag(const std::string& key, bool& ref, const std::string& help) {
  auto* opt = app_->add_flag("--" + key + ",!--no-" + key, ref, help);
  bind(key, opt, [&ref](const json& v) { ref = v.get<bool>(); });
  return opt;
}

CLI::Option* Params::mode(std::string& ref, const std::vector<std::string>& choices) {
  auto* opt = app_->add_option("mode", ref, "one of " + join(choices, "|"))
                  ->check(CLI::IsMember(choices))
                  ->capture_default_str();
  bind("mode", opt, [&ref, choices](const json& v) {
    const auto s = v.get<std::string>();
    if (std::find(choices.begin(), choices.end(), s) == choices.end())
      throw InputError("field 'mode': '" + s + "' is not one of " + join(choices, "|"));
    ref = s;
  });
  return opt;
}

void Params::bind(const std::string& key, CLI::Option* opt, std::function<void(const json&)> set) {
  bindings_[key] = {opt, std::move(set)};
}

void Params::apply(const json& scenario, const std::string& command) const {
  if (!scenario.is_object()) throw InputError("scenario file must hold a JSON object");
  for (const auto& [key, value] : scenario.items()) {
    if (key == "subcommand") {
      if (value != command)
        throw InputError("field 'subcommand': scenario is for '" + value.dump() + "', not '" + command + "'");
      continue;
    }
    const auto it = bindings_.find(key);
    if (it == bindings_.end()) throw InputError("field '" + key + "': unknown for " + command);
    if (it->second.opt && it->second.opt->count() > 0) continue;
    try {
      it->second.set(value);
    } catch (const json::exception& e) {
      throw InputError("field '" + key + "': " + e.what());
    }
  }
}

void Run::check(const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++failed;
  out << (pass ? "PASS " : "FAIL ") << name;
  if (!detail.empty()) out << ": " << detail;
  out << "\n";
}

void Run::write(const std::string& file, const std::string& content) {
  if (out_dir.empty()) {
    out << "# " << file << "\n" << content;
    if (!content.empty() && content.back() != '\n') out << "\n";
    return;
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const auto path = fs::path(out_dir) / file;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path.string() + "'");
  f << content;
}

void Run::write_json(const std::string& file, const json& body) {
  json doc = json::object();
  doc["meta"] = meta;
  for (const auto& [k, v] : body.items()) doc[k] = v;
  write(file, doc.dump(2) + "\n");
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t t) {
  // splitmix64 step
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (t + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += sep;
    s += parts[i];
  }
  return s;
}

}  // namespace deskcech::cli
