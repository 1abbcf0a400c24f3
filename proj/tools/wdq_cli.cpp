// Command-line front end: simulate, reflect, fluid, rate, fclt, mdp-tail, oracle.
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wdq/config.hpp"
#include "wdq/diffusion.hpp"
#include "wdq/fluid.hpp"
#include "wdq/oracle.hpp"
#include "wdq/paths.hpp"
#include "wdq/ratefn.hpp"
#include "wdq/recursion.hpp"
#include "wdq/reflection.hpp"
#include "wdq/tailprob.hpp"

using namespace wdq;
using nlohmann::json;

namespace {

// Writes to the file named by `path`, or stdout when it is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open " + path);
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string fd(double x) { return format_double(x); }

std::vector<double> parse_ladder(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::invalid_argument("empty n ladder");
  return out;
}

TailEvent parse_event(const std::string& s) {
  // endpoint:a=1.0 or sup:a=1.0
  auto colon = s.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("event must look like endpoint:a=1.0");
  std::string kind = s.substr(0, colon), rest = s.substr(colon + 1);
  if (rest.rfind("a=", 0) != 0) throw std::invalid_argument("event must look like endpoint:a=1.0");
  TailEvent e;
  if (kind == "endpoint") e.kind = TailKind::endpoint;
  else if (kind == "sup") e.kind = TailKind::sup;
  else throw std::invalid_argument("unknown event kind: " + kind);
  e.a = std::stod(rest.substr(2));
  return e;
}

Process parse_process(const std::string& s) {
  if (s == "w") return Process::w;
  if (s == "v") return Process::v;
  throw std::invalid_argument("process must be w or v");
}

RunConfig config_or_default(const std::string& path) {
  if (path.empty()) {
    RunConfig c;
    c.params.theta_law = DistributionSpec::normal(1.0, 1.0);
    c.params.x_law = DistributionSpec::normal(1.0, 1.0);
    return c;
  }
  return load_config(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Queues with waiting-time dependent service: simulation and verification"};
  app.require_subcommand(1);

  std::string config, out;
  std::uint64_t seed_override = 0;
  bool have_seed = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON model configuration");
    sub->add_option("--out", out, "output CSV (default stdout)");
    sub->add_option("--seed", seed_override, "override the configured seed")->each([&](const std::string&) {
      have_seed = true;
    });
  };
  auto seed_of = [&](const RunConfig& c) { return have_seed ? seed_override : c.seed; };

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate the waiting-time recursion");
  add_common(sim);
  double sim_n = 1000;
  std::size_t sim_reps = 1;
  std::string scaling = "fluid", sim_process = "w";
  sim->add_option("--n", sim_n, "scaling level n")->check(CLI::PositiveNumber);
  sim->add_option("--reps", sim_reps, "replications")->check(CLI::PositiveNumber);
  sim->add_option("--scaling", scaling, "raw|fluid|diffusion|md")
      ->check(CLI::IsMember({"raw", "fluid", "diffusion", "md"}));
  sim->add_option("--process", sim_process, "w (reflected) or v (linear)")->check(CLI::IsMember({"w", "v"}));

  // reflect
  auto* refl = app.add_subcommand("reflect", "apply a reflection map to a path");
  std::string op = "r", in_path, l_out;
  double refl_theta = 0.0;
  refl->add_option("--op", op, "r|m|rtheta")->check(CLI::IsMember({"r", "m", "rtheta"}));
  refl->add_option("--theta", refl_theta, "linear drift coefficient");
  refl->add_option("--in", in_path, "input path CSV (t,value)")->required();
  refl->add_option("--out", out, "output CSV for the regulated path");
  refl->add_option("--regulator-out", l_out, "output CSV for the regulator");

  // fluid
  auto* flu = app.add_subcommand("fluid", "fluid limits and stability tables");
  add_common(flu);
  bool classify = false, fpath = false, convergence = false;
  std::string ladder = "100,1000,10000", fl_process = "w";
  std::size_t fl_reps = 100, fl_steps = 1000;
  flu->add_flag("--classify", classify, "print the stability table cell for (mu, theta)");
  flu->add_flag("--path", fpath, "write the closed-form fluid path");
  flu->add_flag("--convergence", convergence, "simulated sup-error along an n ladder");
  flu->add_option("--n-ladder", ladder, "comma separated n values");
  flu->add_option("--reps", fl_reps, "replications per rung");
  flu->add_option("--steps", fl_steps, "grid cells for --path");
  flu->add_option("--process", fl_process, "w or v")->check(CLI::IsMember({"w", "v"}));

  // rate
  auto* rt = app.add_subcommand("rate", "evaluate a moderate-deviation rate function");
  add_common(rt);
  std::string rcase = "w-pos", phi_path, decomp_out;
  rt->add_option("--case", rcase, "w-pos|w-zero|v-pos|v-zero")
      ->check(CLI::IsMember({"w-pos", "w-zero", "v-pos", "v-zero"}));
  rt->add_option("--phi", phi_path, "path CSV (t,value), read as piecewise linear")->required();
  rt->add_option("--decomposition-out", decomp_out, "CSV with t,psi1,psi2,y");

  // fclt
  auto* fc = app.add_subcommand("fclt", "diffusion-scale check against the limiting diffusion");
  add_common(fc);
  std::string fcase = "i";
  double fc_n = 1000, fc_t = 1.0, fc_eta = 0.0, fc_delta = 0.5;
  std::size_t fc_reps = 200;
  fc->add_option("--case", fcase, "i|ii|iii")->check(CLI::IsMember({"i", "ii", "iii"}));
  fc->add_option("--n", fc_n, "scaling level")->check(CLI::PositiveNumber);
  fc->add_option("--t", fc_t, "evaluation time")->check(CLI::PositiveNumber);
  fc->add_option("--reps", fc_reps, "replications")->check(CLI::Range(2ul, 100000000ul));
  fc->add_option("--eta", fc_eta, "diffusion-scale drift perturbation");
  fc->add_option("--delta", fc_delta, "sup threshold for case iii");

  // mdp-tail
  auto* md = app.add_subcommand("mdp-tail", "moderate-deviation tail decay along an n ladder");
  add_common(md);
  std::string event = "endpoint:a=1.0", md_ladder = "1000,10000", estimator = "plain", md_process = "w";
  std::size_t md_reps = 10000;
  double md_beta = NAN;
  md->add_option("--event", event, "endpoint:a=<a> or sup:a=<a>");
  md->add_option("--n-ladder", md_ladder, "comma separated n values");
  md->add_option("--reps", md_reps, "replications per rung")->check(CLI::PositiveNumber);
  md->add_option("--beta", md_beta, "b_n = n^beta (overrides config)");
  md->add_option("--estimator", estimator, "plain|tilted")->check(CLI::IsMember({"plain", "tilted"}));
  md->add_option("--process", md_process, "w or v")->check(CLI::IsMember({"w", "v"}));

  // oracle
  auto* orc = app.add_subcommand("oracle", "brute-force oracle cross-checks");
  std::string suite = "all";
  std::size_t instances = 1000;
  std::uint64_t orc_seed = 1;
  orc->add_option("--suite", suite, "all")->check(CLI::IsMember({"all"}));
  orc->add_option("--instances", instances, "instances per oracle")->check(CLI::PositiveNumber);
  orc->add_option("--seed", orc_seed, "master seed");
  orc->add_option("--out", out, "output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      RunConfig c = config_or_default(config);
      const std::uint64_t seed = seed_of(c);
      Output o(out);
      o.os() << "rep,t,value\n";
      for (std::size_t r = 0; r < sim_reps; ++r) {
        StepPath p;
        if (sim_process == "w") {
          SimOutput s = simulate_w(c.params, sim_n, derive_seed(seed, r));
          p = scaling == "raw" ? s.w_path : scaling == "fluid" ? s.fluid_view
              : scaling == "diffusion" ? s.diffusion_view : s.md_view;
        } else {
          LinearSimOutput s = simulate_v(c.params, sim_n, derive_seed(seed, r), c.params.w0);
          p = scaling == "raw" ? s.v_path : scaling == "fluid" ? s.fluid_view
              : scaling == "diffusion" ? s.diffusion_view : s.md_view;
        }
        for (std::size_t k = 0; k < p.size(); ++k) o.os() << r << ',' << fd(p.grid().time(k)) << ',' << fd(p[k]) << '\n';
      }
      return 0;
    }

    if (refl->parsed()) {
      StepPath x = read_csv(in_path);
      if (op != "r" && theta_step_unstable(refl_theta, x.grid()))
        std::cerr << "warning: |theta| dt >= 1, the explicit scheme is not contractive on this grid\n";
      Output o(out);
      if (op == "m") {
        write_csv(o.os(), map_m(x, refl_theta));
        return 0;
      }
      ReflectionPair pr = op == "r" ? reflect(x) : reflect_theta(x, refl_theta);
      write_csv(o.os(), pr.z);
      if (!l_out.empty()) write_csv(l_out, pr.l);
      return 0;
    }

    if (flu->parsed()) {
      RunConfig c = config_or_default(config);
      const ModelParams& p = c.params;
      const bool w = fl_process == "w";
      if (!classify && !fpath && !convergence) classify = true;
      if (classify) {
        auto cls = w ? classify_w(p.mu(), p.theta()) : classify_v(p.mu(), p.theta());
        std::cout << (w ? "W" : "V") << " mu=" << fd(p.mu()) << " theta=" << fd(p.theta()) << ": " << describe(cls)
                  << "\n";
        if (w && cls.initial_condition_dependent && !(p.w0 < *cls.unstable_fixed_point))
          std::cerr << "warning: w0 >= mu/theta, the fluid path escapes to infinity\n";
        if (w) {
          if (auto t0 = fluid_hitting_time(p.mu(), p.theta(), p.w0)) std::cout << "hitting time " << fd(*t0) << "\n";
        }
      }
      if (fpath) {
        Grid g(p.horizon, fl_steps);
        Output o(out);
        write_csv(o.os(), w ? fluid_w(p.mu(), p.theta(), p.w0, g) : fluid_v(p.mu(), p.theta(), p.w0, g));
      }
      if (convergence) {
        ConvergenceReport rep =
            fluid_convergence_report(p, parse_ladder(ladder), fl_reps, seed_of(c), w ? Process::w : Process::v);
        Output o(fpath ? std::string() : out);
        o.os() << "n,reps,mean_sup_error,se,median,q90\n";
        for (const auto& r : rep.rows)
          o.os() << fd(r.n) << ',' << r.reps << ',' << fd(r.mean_sup_error) << ',' << fd(r.se) << ','
                 << fd(r.median) << ',' << fd(r.q90) << '\n';
        std::cerr << "nonincreasing: " << (rep.nonincreasing ? "yes" : "no") << "\n";
      }
      return 0;
    }

    if (rt->parsed()) {
      RunConfig c = config_or_default(config);
      RateCase rc = rate_case_from_string(rcase);
      RateParams p;
      p.mu = c.params.mu();
      p.theta = c.params.theta();
      p.sigma_x = c.params.sigma_x();
      p.sigma_theta = c.params.sigma_theta();
      p.r = c.params.r;
      p.center = center_of(rc);
      p.initial = c.params.md_offset;
      StepPath raw = read_csv(phi_path);
      PiecewiseLinearPath phi(raw.grid(), std::vector<double>(raw.values().begin(), raw.values().end()));
      RateReport rep = rate_report(phi, p, rc);
      auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json("inf"); };
      json j;
      j["case"] = to_string(rc);
      j["value_closed_form"] = num(rep.value_closed_form);
      j["value_variational"] = num(rep.value_variational);
      j["oracle_converged"] = rep.oracle_converged;
      j["gap"] = num(rep.gap);
      j["decomposition_value"] = num(rep.decomposition.value);
      if (center_of(rc) == Center::positive && !is_infinite_rate(rep.value_closed_form)) {
        j["constraint_residual"] = rep.decomposition.residual_sup;
        j["euler_tolerance"] = rep.decomposition.euler_tolerance;
      }
      Output o(out);
      o.os() << j.dump(2) << "\n";
      if (!decomp_out.empty() && !is_infinite_rate(rep.value_closed_form)) {
        std::ofstream d(decomp_out);
        if (!d) throw std::runtime_error("cannot open " + decomp_out);
        const auto& dc = rep.decomposition;
        d << "t,psi1,psi2,y\n";
        for (std::size_t k = 0; k < dc.psi1.size(); ++k)
          d << fd(phi.grid().time(k)) << ',' << fd(dc.psi1[k]) << ',' << fd(dc.psi2[k]) << ','
            << fd(dc.y ? (*dc.y)[k] : 0.0) << '\n';
      }
      return 0;
    }

    if (fc->parsed()) {
      RunConfig c = config_or_default(config);
      FcltCase want = fcase == "i" ? FcltCase::i : fcase == "ii" ? FcltCase::ii : FcltCase::iii;
      FcltCase have = fclt_case_of(c.params.mu(), c.params.theta());
      if (want != have)
        throw std::invalid_argument("configured regime is case " + to_string(have) + ", not " + fcase);
      FcltReport rep = fclt_check(c.params, fc_eta, fc_n, fc_t, fc_reps, seed_of(c), fc_delta);
      Output o(out);
      o.os() << "rep,queue,limit\n";
      for (std::size_t r = 0; r < rep.queue_samples.size(); ++r)
        o.os() << r << ',' << fd(rep.queue_samples[r]) << ','
               << (r < rep.limit_samples.size() ? fd(rep.limit_samples[r]) : std::string("")) << '\n';
      std::cerr << "case " << to_string(rep.fclt_case) << ": mean " << rep.queue.empirical_mean << " (target "
                << rep.queue.target_mean << ", z " << rep.queue.z_mean << "), var " << rep.queue.empirical_var
                << " (target " << rep.queue.target_var << ", z " << rep.queue.z_var << "), ks " << rep.ks
                << ", regulator active " << rep.l_active_fraction;
      if (rep.sup_exceed) std::cerr << ", P(sup>" << rep.delta << ") " << *rep.sup_exceed;
      std::cerr << "\n";
      return 0;
    }

    if (md->parsed()) {
      RunConfig c = config_or_default(config);
      if (!std::isnan(md_beta)) {
        c.params.beta = md_beta;
        c.params.validate();
      }
      DecayOptions opt;
      opt.process = parse_process(md_process);
      if (opt.process == Process::w) {
        auto cls = classify_w(c.params.mu(), c.params.theta());
        if (cls.initial_condition_dependent && !(c.params.w0 < *cls.unstable_fixed_point))
          throw std::invalid_argument("mu < 0 and theta < 0 need w0 < mu/theta, otherwise the queue escapes");
      }
      opt.estimator = estimator == "tilted" ? Estimator::tilted : Estimator::plain;
      DecayEstimate est = estimate_decay(c.params, parse_event(event), parse_ladder(md_ladder), md_reps, seed_of(c), opt);
      Output o(out);
      o.os() << "n,b_n,reps,hits,p_hat,se,upper95,rate,censored,rate_lower_bound\n";
      for (const auto& r : est.rungs)
        o.os() << fd(r.n) << ',' << fd(r.b_n) << ',' << r.sample.reps << ',' << r.sample.hits << ','
               << fd(r.sample.p_hat) << ',' << (r.sample.se ? fd(*r.sample.se) : std::string("insufficient")) << ','
               << fd(r.sample.upper95) << ',' << (r.rate ? fd(*r.rate) : std::string("")) << ','
               << (r.censored ? 1 : 0) << ',' << (r.censored ? fd(r.rate_lower_bound) : std::string("")) << '\n';
      if (est.target)
        std::cerr << "target " << *est.target << ", trend " << to_string(est.trend) << ", last rung within band: "
                  << (est.last_within_band ? "yes" : "no") << "\n";
      return 0;
    }

    if (orc->parsed()) {
      auto rows = run_oracle_suite(instances, orc_seed);
      Output o(out);
      o.os() << "oracle,instances,failures,worst,status\n";
      bool all = true;
      for (const auto& r : rows) {
        o.os() << r.name << ',' << r.instances << ',' << r.failures << ',' << fd(r.worst) << ','
               << (r.pass() ? "pass" : "FAIL") << '\n';
        all = all && r.pass();
      }
      return all ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
