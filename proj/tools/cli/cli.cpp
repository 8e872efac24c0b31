#include "cli.hpp"

#include <fstream>

#include "common.hpp"
#include "deskcech/chase.hpp"
#include "deskcech/errors.hpp"

namespace deskcech::cli {

namespace {

struct Slot {
  std::unique_ptr<Command> cmd;
  CLI::App* app = nullptr;
  std::unique_ptr<Params> params;
  std::string mode;
  std::uint64_t seed = 1;
  std::string out_dir;
  double tolerance = 0.0;
  std::string scenario;
};

json load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open scenario file '" + path + "'");
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw InputError("scenario file '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantitative Cech cohomology desk models", "deskcech"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "deskcech 0.1.0");

  std::vector<Slot> slots;
  for (auto make : {make_cover, make_cochain, make_chase, make_cousin, make_psspace, make_growth}) {
    Slot s;
    s.cmd = make();
    s.tolerance = s.cmd->default_tolerance();
    slots.push_back(std::move(s));
  }
  for (auto& s : slots) {
    s.app = app.add_subcommand(s.cmd->name(), s.cmd->help());
    s.params = std::make_unique<Params>(s.app);
    s.params->add("seed", s.seed, "random seed");
    s.params->add("out", s.out_dir, "report directory (stdout when empty)");
    s.params->add("tolerance", s.tolerance, "check tolerance");
    s.app->add_option("--scenario", s.scenario, "JSON scenario; flags override its fields");
    s.cmd->setup(*s.params, s.mode);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  for (auto& s : slots) {
    if (!s.app->parsed()) continue;
    Run r(out, err);
    try {
      if (!s.scenario.empty()) s.params->apply(load_scenario(s.scenario), s.cmd->name());
      r.command = s.cmd->name();
      r.mode = s.mode;
      r.seed = s.seed;
      r.out_dir = s.out_dir;
      r.tolerance = s.tolerance;
      r.meta["tool"] = "deskcech 0.1.0";
      r.meta["command"] = r.command;
      if (!r.mode.empty()) r.meta["mode"] = r.mode;
      r.meta["seed"] = r.seed;
      r.meta["tolerance"] = r.tolerance;
      s.cmd->execute(r);
    } catch (const InputError& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    } catch (const DomainError& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    } catch (const PreconditionError& e) {
      err << "error: precondition failed: " << e.what() << "\n";
      return 2;
    } catch (const chase::ObstructionError& e) {
      r.check(s.cmd->name() + ".solve", false, e.what());
      return 1;
    } catch (const NumericalError& e) {
      r.check(s.cmd->name() + ".solve", false, e.what());
      return 1;
    }
    return r.status();
  }
  return 2;
}

}  // namespace deskcech::cli
