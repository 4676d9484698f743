// cfo: data generation, training and evaluation for continuous flow operators.
//
//   cfo gen-data    --system lorenz --n-traj 1000 --n-times 201 --out train.cfo
//   cfo train       --data train.cfo --spline quintic --keep-rate 0.25 --seeds 0,1,2
//   cfo train-ar    --data train.cfo
//   cfo eval        --checkpoint run/cfo_quintic_keep1_seed0.json --data test.cfo
//   cfo convergence --data lorenz_1001.cfo
//   cfo nfe-sweep   --checkpoint ... --data test.cfo --budgets 50,100,200,400
//   cfo reverse     --checkpoint ... --data test.cfo --t-star 1 --noise 0,0.01
//
// Relative output paths resolve under $CFO_OUTPUT_ROOT when it is set.
// Exit codes: 0 ok, 2 invalid config, 3 numeric failure, 4 I/O failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfo/dataset_io.hpp"
#include "cfo/errors.hpp"
#include "cfo/evaluate.hpp"
#include "cfo/experiments.hpp"
#include "cfo/systems.hpp"
#include "cfo/trainer.hpp"

namespace fs = std::filesystem;
using namespace cfo;

namespace {

enum Exit { kOk = 0, kInvalid = 2, kNumeric = 3, kIo = 4 };

fs::path output_path(const std::string& p) {
    fs::path path(p);
    if (path.is_absolute()) {
        return path;
    }
    if (const char* root = std::getenv("CFO_OUTPUT_ROOT"); root != nullptr && *root != '\0') {
        return fs::path(root) / path;
    }
    return path;
}

void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory " + p.parent_path().string() + ": " + ec.message());
        }
    }
}

// Every option of a subcommand, in declaration order, as "name=value" lines.
std::string settings_of(const CLI::App& sub) {
    std::ostringstream os;
    os << sub.get_name() << '\n';
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_name() == "--help" || opt->get_name() == "--config") {
            continue;
        }
        os << opt->get_name() << '=';
        for (const auto& r : opt->results()) {
            os << r << ',';
        }
        os << '\n';
    }
    return os.str();
}

std::string keep_tag(double keep) {
    std::string s = format_double(keep);
    for (char& c : s) {
        if (c == '.') {
            c = 'p';
        }
    }
    return s;
}

// ---- option blocks -----------------------------------------------------------

struct GenOpts {
    std::string system = "lorenz";
    std::size_t n_traj = 100;
    std::size_t n_times = 0;  // 0 = system default
    double horizon = 0.0;     // 0 = system default
    std::size_t substeps = 0;
    double init_box = 5.0;
    double nu = 0.01;
    std::size_t nx = 100;
    std::uint64_t seed = 0;
    std::string format = "binary";
    std::string out;
};

struct TrainOpts {
    std::string data;
    std::string validation;
    double keep_rate = 1.0;
    std::string spline = "quintic";
    std::vector<std::uint64_t> seeds{0};
    TrainConfig train;
    std::vector<std::size_t> hidden{64, 128, 128, 64};
    int embed_bands = 8;
    std::string out_dir = "runs";
};

struct SolverOpts {
    std::string method = "rk4";
    std::size_t substeps = 1;
};

struct EvalOpts {
    std::string checkpoint;
    bool analytic = false;
    std::string data;
    SolverOpts solver;
    std::string out;
};

struct ConvOpts {
    std::string data;
    std::vector<std::size_t> strides{1, 2, 4};
    std::size_t max_segments = 0;
    std::string out = "convergence.csv";
};

struct NfeOpts {
    std::string checkpoint;
    bool analytic = false;
    std::string data;
    std::vector<double> budgets{50, 100, 200, 400};
    std::vector<std::string> methods{"euler", "heun", "rk4"};
    std::string out = "nfe_sweep.csv";
};

struct ReverseOpts {
    std::string checkpoint;
    bool analytic = false;
    std::string data;
    double t_star = 1.0;
    std::vector<double> noise{0.0};
    SolverOpts solver;
    std::uint64_t seed = 0;
    std::string out = "reverse.csv";
};

void add_train_options(CLI::App* sub, TrainOpts& o, bool cfo) {
    sub->add_option("--data", o.data, "Training dataset")->required();
    sub->add_option("--validation", o.validation, "Dataset for checkpoint selection");
    sub->add_option("--keep-rate", o.keep_rate, "Fraction of time points kept per trajectory")
        ->check(CLI::Range(0.0, 1.0));
    if (cfo) {
        sub->add_option("--spline", o.spline, "linear | quintic")
            ->check(CLI::IsMember({"linear", "quintic"}));
        sub->add_option("--gamma0", o.train.gamma0, "Noise amplitude");
        sub->add_option("--noise-m", o.train.noise_m, "Noise schedule exponent");
        sub->add_option("--embed-bands", o.embed_bands, "Time-embedding frequencies");
    }
    sub->add_option("--seeds", o.seeds, "One run per seed")->delimiter(',');
    sub->add_option("--steps", o.train.steps);
    sub->add_option("--batch-size", o.train.batch_size);
    sub->add_option("--lr", o.train.learning_rate);
    sub->add_option("--beta1", o.train.beta1);
    sub->add_option("--beta2", o.train.beta2);
    sub->add_option("--adam-eps", o.train.adam_eps);
    sub->add_option("--eval-every", o.train.eval_every);
    sub->add_option("--hidden", o.hidden, "Hidden widths")->delimiter(',');
    sub->add_option("--out-dir", o.out_dir, "Directory for checkpoints and histories");
}

void add_solver_options(CLI::App* sub, SolverOpts& o) {
    sub->add_option("--method", o.method, "euler | heun | rk4")
        ->check(CLI::IsMember({"euler", "heun", "rk4"}));
    sub->add_option("--substeps", o.substeps, "Solver steps per grid interval");
}

SolverConfig solver_config(const SolverOpts& o) {
    SolverConfig s;
    s.method = method_from_string(o.method);
    s.substeps_per_interval = o.substeps;
    return s;
}

// ---- commands ----------------------------------------------------------------

int cmd_gen_data(const GenOpts& o, const std::string& settings) {
    TrajectorySet set;
    if (o.system == "lorenz") {
        LorenzGenConfig c;
        c.n_traj = o.n_traj;
        c.n_times = o.n_times ? o.n_times : 1001;
        c.horizon_seconds = o.horizon > 0 ? o.horizon : 5.0;
        c.init_box = o.init_box;
        c.substeps = o.substeps ? o.substeps : 10;
        c.seed = o.seed;
        set = generate_lorenz(c);
    } else {
        BurgersGenConfig c;
        c.pde.nu = o.nu;
        c.pde.nx = o.nx;
        c.n_traj = o.n_traj;
        c.n_times = o.n_times ? o.n_times : 101;
        c.horizon_seconds = o.horizon > 0 ? o.horizon : 1.0;
        c.substeps = o.substeps;
        c.seed = o.seed;
        set = generate_burgers(c);
    }
    const fs::path out = output_path(
        o.out.empty() ? o.system + "_seed" + std::to_string(o.seed) + ".cfo" : o.out);
    ensure_parent(out);
    write_dataset(out, set, o.format == "json" ? DatasetFormat::Json : DatasetFormat::Binary);
    std::printf("wrote %zu %s trajectories to %s (fingerprint %s)\n", set.size(),
                set.system.c_str(), out.string().c_str(), fingerprint(settings).c_str());
    return kOk;
}

int cmd_train(TrainOpts o, bool cfo, const std::string& settings) {
    const std::string fp = fingerprint(settings);
    const TrajectorySet full = read_dataset(o.data);
    std::optional<TrajectorySet> validation;
    if (!o.validation.empty()) {
        validation = read_dataset(o.validation);
    }
    MlpConfig mlp;
    mlp.state_dim = full.state_dim;
    mlp.hidden_dims = o.hidden;
    mlp.embed_bands = o.embed_bands;
    if (cfo) {
        o.train.spline_kind = spline_kind_from_string(o.spline);
    }
    const fs::path dir = output_path(o.out_dir);
    fs::create_directories(dir);

    for (std::uint64_t seed : o.seeds) {
        TrainConfig tc = o.train;
        tc.seed = seed;
        const TrajectorySet data = o.keep_rate < 1.0 ? full.subsampled(o.keep_rate, seed) : full;
        const std::string stem = (cfo ? "cfo_" + o.spline : std::string("ar")) + "_keep" +
                                 keep_tag(o.keep_rate) + "_seed" + std::to_string(seed);
        TrainResult r = [&] {
            try {
                return cfo ? train_cfo(data, validation ? &*validation : nullptr, tc, mlp)
                           : train_ar(data, validation ? &*validation : nullptr, tc, mlp);
            } catch (const TrainingAborted& e) {
                Checkpoint partial{cfo ? ModelKind::Cfo : ModelKind::Autoregressive,
                                   e.last_good().model, {{"aborted", e.what()}, {"fingerprint", fp}}};
                write_checkpoint(dir / (stem + ".aborted.json"), partial);
                throw;
            }
        }();

        CsvTable hist({"step", "loss", "eval_error"}, fp);
        for (const auto& h : r.history) {
            hist.row({std::to_string(h.step), format_double(h.train_loss),
                      format_double(h.eval_metric)});
        }
        hist.save(dir / (stem + "_history.csv"));

        Checkpoint ck{cfo ? ModelKind::Cfo : ModelKind::Autoregressive, r.model, {}};
        ck.info = {{"data", o.data},
                   {"keep_rate", format_double(o.keep_rate)},
                   {"seed", std::to_string(seed)},
                   {"steps", std::to_string(tc.steps)},
                   {"best_step", std::to_string(r.best_step)},
                   {"best_eval", format_double(r.best_eval)},
                   {"fingerprint", fp}};
        if (cfo) {
            ck.info["spline"] = o.spline;
            ck.info["gamma0"] = format_double(tc.gamma0);
        }
        write_checkpoint(dir / (stem + ".json"), ck);
        std::printf("seed %llu: final loss %.4e, checkpoint %s\n",
                    static_cast<unsigned long long>(seed),
                    r.history.empty() ? 0.0 : r.history.back().train_loss,
                    (dir / (stem + ".json")).string().c_str());
    }
    return kOk;
}

struct Loaded {
    std::optional<Checkpoint> ckpt;
    Field analytic;
};

Loaded load_model(const std::string& checkpoint, bool analytic, const TrajectorySet& data) {
    Loaded l;
    if (analytic) {
        l.analytic = analytic_field(data);
        return l;
    }
    if (checkpoint.empty()) {
        throw InvalidArgument("either --checkpoint or --analytic is required");
    }
    l.ckpt = read_checkpoint(checkpoint);
    if (l.ckpt->model.config().state_dim != data.state_dim) {
        throw InvalidArgument("checkpoint state_dim " +
                              std::to_string(l.ckpt->model.config().state_dim) +
                              " does not match dataset state_dim " + std::to_string(data.state_dim));
    }
    return l;
}

int cmd_eval(const EvalOpts& o, const std::string& settings) {
    const std::string fp = fingerprint(settings);
    const TrajectorySet data = read_dataset(o.data);
    const Loaded m = load_model(o.checkpoint, o.analytic, data);
    const SolverConfig solver = solver_config(o.solver);
    SetRollout roll;
    if (m.ckpt && m.ckpt->kind == ModelKind::Autoregressive) {
        roll = ar_rollout_set(m.ckpt->model, data);
    } else if (m.ckpt) {
        roll = rollout_set(m.ckpt->model, data, solver);
    } else {
        roll = rollout_set(m.analytic, data, solver);
    }
    std::vector<Eigen::MatrixXd> truths;
    for (const auto& tr : data.trajectories) {
        truths.push_back(tr.states);
    }
    const EvalReport rep = make_report(roll.predictions, truths, roll.nfe);
    CsvTable t({"trajectory", "rel_l2", "final_rel_l2", "nfe"}, fp);
    for (std::size_t i = 0; i < rep.per_trajectory.size(); ++i) {
        t.row({std::to_string(i), format_double(rep.per_trajectory[i]),
               format_double(rep.final_time[i]), std::to_string(rep.nfe)});
    }
    t.row({"mean", format_double(rep.mean), format_double(rep.final_mean), std::to_string(rep.nfe)});
    t.row({"sd", format_double(rep.sd), "", ""});
    const fs::path out = output_path(o.out.empty() ? "eval.csv" : o.out);
    ensure_parent(out);
    t.save(out);
    std::printf("relative L2 %s  final %.3e  nfe %zu\n", rep.summary().c_str(), rep.final_mean,
                rep.nfe);
    if (roll.diverged > 0) {
        std::printf("warning: %zu of %zu rollouts diverged (held at their last finite state)\n",
                    roll.diverged, data.size());
    }
    return kOk;
}

int cmd_convergence(const ConvOpts& o, const std::string& settings) {
    const TrajectorySet data = read_dataset(o.data);
    const auto rows = convergence_study(data, o.strides, o.max_segments);
    const fs::path out = output_path(o.out);
    ensure_parent(out);
    const CsvTable t = convergence_table(rows, fingerprint(settings));
    t.save(out);
    std::cout << t.str();
    return kOk;
}

int cmd_nfe_sweep(const NfeOpts& o, const std::string& settings) {
    const TrajectorySet data = read_dataset(o.data);
    const Loaded m = load_model(o.checkpoint, o.analytic, data);
    if (m.ckpt && m.ckpt->kind == ModelKind::Autoregressive) {
        throw InvalidArgument("nfe-sweep needs a continuous-time model");
    }
    std::vector<Method> methods;
    for (const auto& s : o.methods) {
        methods.push_back(method_from_string(s));
    }
    const auto rows = m.ckpt ? nfe_sweep(m.ckpt->model, data, o.budgets, methods)
                             : nfe_sweep(m.analytic, data, o.budgets, methods);
    const fs::path out = output_path(o.out);
    ensure_parent(out);
    const CsvTable t = nfe_table(rows, fingerprint(settings));
    t.save(out);
    std::cout << t.str();
    return kOk;
}

int cmd_reverse(const ReverseOpts& o, const std::string& settings) {
    const TrajectorySet data = read_dataset(o.data);
    const Loaded m = load_model(o.checkpoint, o.analytic, data);
    if (m.ckpt && m.ckpt->kind == ModelKind::Autoregressive) {
        throw InvalidArgument("reverse needs a continuous-time model");
    }
    const SolverConfig solver = solver_config(o.solver);
    const auto rows = m.ckpt ? reverse_study(m.ckpt->model, data, o.t_star, o.noise, solver, o.seed)
                             : reverse_study(m.analytic, data, o.t_star, o.noise, solver, o.seed);
    const fs::path out = output_path(o.out);
    ensure_parent(out);
    const CsvTable t = reverse_table(rows, fingerprint(settings));
    t.save(out);
    std::printf("%zu rows written to %s\n", t.rows(), out.string().c_str());
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuous flow operator experiments"};
    app.set_config("--config", "", "INI/TOML file with option values; flags override it");
    app.require_subcommand(1);

    GenOpts gen;
    auto* gen_cmd = app.add_subcommand("gen-data", "Simulate a trajectory dataset");
    gen_cmd->add_option("--system", gen.system)->check(CLI::IsMember({"lorenz", "burgers1d"}));
    gen_cmd->add_option("--n-traj", gen.n_traj);
    gen_cmd->add_option("--n-times", gen.n_times, "Snapshots per trajectory (lorenz 1001, burgers 101)");
    gen_cmd->add_option("--horizon", gen.horizon, "Seconds (lorenz 5, burgers 1)");
    gen_cmd->add_option("--substeps", gen.substeps, "RK4 steps per output interval (0 = default)");
    gen_cmd->add_option("--init-box", gen.init_box, "Lorenz initial states in [-b, b]^3");
    gen_cmd->add_option("--nu", gen.nu, "Burgers viscosity");
    gen_cmd->add_option("--nx", gen.nx, "Burgers grid points");
    gen_cmd->add_option("--seed", gen.seed);
    gen_cmd->add_option("--format", gen.format)->check(CLI::IsMember({"binary", "json"}));
    gen_cmd->add_option("--out", gen.out);

    TrainOpts tr;
    auto* train_cmd = app.add_subcommand("train", "Flow-matching training of a CFO");
    add_train_options(train_cmd, tr, true);

    TrainOpts ar;
    ar.train.gamma0 = 0.0;
    auto* ar_cmd = app.add_subcommand("train-ar", "Teacher-forced autoregressive baseline");
    add_train_options(ar_cmd, ar, false);

    EvalOpts ev;
    auto* eval_cmd = app.add_subcommand("eval", "Full-grid rollout error on a dataset");
    eval_cmd->add_option("--checkpoint", ev.checkpoint);
    eval_cmd->add_flag("--analytic", ev.analytic, "Use the true right-hand side as the model");
    eval_cmd->add_option("--data", ev.data)->required();
    add_solver_options(eval_cmd, ev.solver);
    eval_cmd->add_option("--out", ev.out);

    ConvOpts cv;
    auto* conv_cmd = app.add_subcommand("convergence", "Spline velocity error vs step size (Lorenz)");
    conv_cmd->add_option("--data", cv.data)->required();
    conv_cmd->add_option("--strides", cv.strides)->delimiter(',');
    conv_cmd->add_option("--max-segments", cv.max_segments, "0 = all");
    conv_cmd->add_option("--out", cv.out);

    NfeOpts nf;
    auto* nfe_cmd = app.add_subcommand("nfe-sweep", "Final-time error vs evaluation budget");
    nfe_cmd->add_option("--checkpoint", nf.checkpoint);
    nfe_cmd->add_flag("--analytic", nf.analytic);
    nfe_cmd->add_option("--data", nf.data)->required();
    nfe_cmd->add_option("--budgets", nf.budgets, "Percent of the autoregressive NFE")->delimiter(',');
    nfe_cmd->add_option("--methods", nf.methods)->delimiter(',');
    nfe_cmd->add_option("--out", nf.out);

    ReverseOpts rv;
    auto* rev_cmd = app.add_subcommand("reverse", "Backward integration from a later state");
    rev_cmd->add_option("--checkpoint", rv.checkpoint);
    rev_cmd->add_flag("--analytic", rv.analytic);
    rev_cmd->add_option("--data", rv.data)->required();
    rev_cmd->add_option("--t-star", rv.t_star, "Normalised start time (a grid time)");
    rev_cmd->add_option("--noise", rv.noise, "Relative noise levels")->delimiter(',');
    add_solver_options(rev_cmd, rv.solver);
    rev_cmd->add_option("--seed", rv.seed);
    rev_cmd->add_option("--out", rv.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalid;
    }

    try {
        if (*gen_cmd) return cmd_gen_data(gen, settings_of(*gen_cmd));
        if (*train_cmd) return cmd_train(tr, true, settings_of(*train_cmd));
        if (*ar_cmd) return cmd_train(ar, false, settings_of(*ar_cmd));
        if (*eval_cmd) return cmd_eval(ev, settings_of(*eval_cmd));
        if (*conv_cmd) return cmd_convergence(cv, settings_of(*conv_cmd));
        if (*nfe_cmd) return cmd_nfe_sweep(nf, settings_of(*nfe_cmd));
        if (*rev_cmd) return cmd_reverse(rv, settings_of(*rev_cmd));
    } catch (const InvalidArgument& e) {
        std::fprintf(stderr, "cfo: invalid configuration: %s\n", e.what());
        return kInvalid;
    } catch (const OutOfRange& e) {
        std::fprintf(stderr, "cfo: invalid configuration: %s\n", e.what());
        return kInvalid;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "cfo: numeric failure: %s\n", e.what());
        return kNumeric;
    } catch (const IoError& e) {
        std::fprintf(stderr, "cfo: %s\n", e.what());
        return kIo;
    } catch (const fs::filesystem_error& e) {
        std::fprintf(stderr, "cfo: %s\n", e.what());
        return kIo;
    }
    return kInvalid;
}
