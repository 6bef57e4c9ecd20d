#include "chronoscale/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "chronoscale/errors.hpp"

namespace chronoscale::cli {

using ordered_json = nlohmann::ordered_json;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, end);
}

namespace {

ordered_json vector_json(const Vector& v) {
    ordered_json arr = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

ordered_json number_json(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

template <class Fn>
int guarded(const std::filesystem::path& file, std::ostream& err, Fn&& body) {
    try {
        return body();
    } catch (const SchemaError& e) {
        err << file.string() << ": invalid scenario: " << e.what() << "\n";
        return kExitSchema;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidSpec) {
            err << file.string() << ": invalid scenario: " << e.what() << "\n";
            return kExitSchema;
        }
        err << file.string() << ": " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        err << file.string() << ": " << e.what() << "\n";
        return kExitFailure;
    }
}

std::string render(const Scenario& scenario, const Trajectory& traj, Format format) {
    if (format == Format::Csv) return trajectory_csv(traj);
    return trajectory_json(scenario, traj).dump(2) + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

const char* density_name(Density d) { return d == Density::Dense ? "dense" : "scattered"; }

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream os;
    const Eigen::Index n = traj.samples.empty() ? 0 : traj.samples.front().y.size();
    os << "t";
    for (Eigen::Index i = 1; i <= n; ++i) os << ",y" << i;
    os << ",jump\n";

    std::size_t next_jump = 0;
    for (const Sample& s : traj.samples) {
        os << format_number(s.t);
        for (Eigen::Index i = 0; i < s.y.size(); ++i) os << ',' << format_number(s.y[i]);
        os << ',';
        while (next_jump < traj.jumps.size() && traj.jumps[next_jump].t < s.t) ++next_jump;
        if (next_jump < traj.jumps.size() && traj.jumps[next_jump].t == s.t) {
            os << format_number(traj.jumps[next_jump].sigma);
        }
        os << '\n';
    }
    return os.str();
}

ordered_json trajectory_json(const Scenario& scenario, const Trajectory& traj) {
    ordered_json out;
    out["scenario"] = scenario.name;
    out["kind"] = std::string(to_string(traj.kind));
    out["dimension"] = scenario.y0.size();
    out["t0"] = scenario.t0;
    out["t_end"] = scenario.t_end;
    out["reached_end"] = traj.reached_end;

    ordered_json samples = ordered_json::array();
    for (const Sample& s : traj.samples) samples.push_back(ordered_json{{"t", s.t}, {"y", vector_json(s.y)}});
    out["samples"] = std::move(samples);

    ordered_json jumps = ordered_json::array();
    for (const JumpRecord& j : traj.jumps) {
        jumps.push_back(ordered_json{
            {"t", j.t}, {"sigma", j.sigma}, {"before", vector_json(j.before)}, {"after", vector_json(j.after)}});
    }
    out["jumps"] = std::move(jumps);

    out["stats"] = ordered_json{{"accepted_steps", traj.stats.accepted_steps},
                                {"rejected_steps", traj.stats.rejected_steps},
                                {"rhs_evaluations", traj.stats.rhs_evaluations},
                                {"jumps", traj.stats.jumps},
                                {"boundary_bisections", traj.stats.boundary_bisections}};
    return out;
}

Trajectory run_scenario(const Scenario& scenario) {
    const PiecewiseRHS rhs = build_rhs(scenario);
    const Vector y0 = initial_state(scenario);
    if (scenario.state_domain) {
        return solve_ivp_state_dependent(build_domain(scenario), rhs, scenario.t0, y0, scenario.t_end,
                                         scenario.options);
    }
    return solve_ivp(build_scale(scenario), rhs, scenario.t0, y0, scenario.t_end, scenario.options);
}

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(args.scenario, err, [&] {
        const Scenario scenario = load_scenario(args.scenario);
        const Trajectory traj = run_scenario(scenario);
        spdlog::debug("{}: {} samples, {} jumps, {} steps", args.scenario.string(), traj.samples.size(),
                      traj.jumps.size(), traj.stats.accepted_steps);
        if (!traj.reached_end) {
            spdlog::warn("{}: t_end lies in a gap of the final slice; stopped at t = {}", args.scenario.string(),
                         traj.final_sample().t);
        }
        const std::string text = render(scenario, traj, args.format);
        if (args.out) {
            write_file(*args.out, text);
        } else {
            out << text;
        }
        return kExitOk;
    });
}

int cmd_solve_batch(const BatchArgs& args, std::ostream& err) {
    std::vector<std::filesystem::path> files;
    try {
        for (const auto& entry : std::filesystem::directory_iterator(args.directory)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
        }
        std::filesystem::create_directories(args.out_dir);
    } catch (const std::filesystem::filesystem_error& e) {
        err << e.what() << "\n";
        return kExitFailure;
    }
    std::sort(files.begin(), files.end());

    const std::string extension = args.format == Format::Csv ? ".csv" : ".json";
    std::vector<int> codes(files.size(), kExitOk);
    std::vector<std::string> messages(files.size());
    std::atomic<std::size_t> cursor{0};

    auto worker = [&] {
        for (std::size_t i = cursor++; i < files.size(); i = cursor++) {
            std::ostringstream sink;
            std::ostringstream log;
            SolveArgs one{files[i], args.out_dir / (files[i].stem().string() + extension), args.format};
            codes[i] = cmd_solve(one, sink, log);
            messages[i] = log.str();
        }
    };

    unsigned workers = args.workers ? args.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(files.size(), 1)));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    int code = kExitOk;
    for (std::size_t i = 0; i < files.size(); ++i) {
        err << messages[i];
        code = std::max(code, codes[i]);
    }
    spdlog::info("batch: {} scenarios, exit {}", files.size(), code);
    return code;
}

int cmd_classify(const ClassifyArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(args.scenario, err, [&] {
        const Scenario scenario = load_scenario(args.scenario);
        const TimeScale ts = build_scale(scenario);
        const auto [lo, hi] = args.window.value_or(std::pair{scenario.t0, scenario.t_end});
        if (!(lo <= hi)) throw Error(ErrorCode::InvalidArgument, "window lower end exceeds upper end");

        const std::vector<Piece> segs = segments(ts, Window{lo, hi});
        const std::vector<double> points = scattered_points(ts, Window{lo, hi});

        if (args.json) {
            ordered_json doc;
            doc["window"] = ordered_json::array({lo, hi});
            ordered_json js = ordered_json::array();
            for (const Piece& p : segs) js.push_back(ordered_json::array({number_json(p.lo), number_json(p.hi)}));
            doc["segments"] = std::move(js);
            ordered_json jp = ordered_json::array();
            for (double t : points) {
                const PointClass c = classify(ts, t);
                jp.push_back(ordered_json{{"t", t},
                                          {"sigma", sigma(ts, t).value},
                                          {"mu", graininess(ts, t)},
                                          {"left", density_name(c.left)}});
            }
            doc["scattered_points"] = std::move(jp);
            out << doc.dump(2) << "\n";
            return kExitOk;
        }

        out << "window [" << format_number(lo) << ", " << format_number(hi) << "]\n";
        out << "segments\n";
        for (const Piece& p : segs) {
            if (p.is_point()) {
                out << "  {" << format_number(p.lo) << "}\n";
            } else {
                out << "  [" << format_number(p.lo) << ", " << format_number(p.hi) << "]\n";
            }
        }
        out << "scattered points\n";
        if (points.empty()) {
            out << "  (none)\n";
        } else {
            out << "  t\tsigma\tmu\tleft\n";
            for (double t : points) {
                out << "  " << format_number(t) << '\t' << format_number(sigma(ts, t).value) << '\t'
                    << format_number(graininess(ts, t)) << '\t' << density_name(classify(ts, t).left) << '\n';
            }
        }
        return kExitOk;
    });
}

namespace {

struct Hypothesis {
    const char* name;
    std::optional<double> supplied;
    double sampled;
    const std::optional<BoundWitness>* witness;

    [[nodiscard]] bool holds() const { return !supplied || sampled <= *supplied * (1.0 + 1e-9) + 1e-12; }
};

ordered_json hypothesis_json(const Hypothesis& h) {
    ordered_json out{{"bound", h.name}, {"supplied", h.supplied ? number_json(*h.supplied) : ordered_json(nullptr)},
                     {"sampled", h.sampled}};
    if (*h.witness) {
        out["witness"] = ordered_json{{"t", (*h.witness)->t}, {"y", vector_json((*h.witness)->y)}};
    } else {
        out["witness"] = nullptr;
    }
    out["holds"] = h.holds();
    return out;
}

}  // namespace

int cmd_verify(const std::filesystem::path& file, std::ostream& out, std::ostream& err) {
    return guarded(file, err, [&] {
        const Scenario scenario = load_scenario(file);
        if (!scenario.theorem) throw SchemaError("theorem", "required for verify");
        const TheoremSpec& th = *scenario.theorem;
        const TimeScale ts = build_scale(scenario);
        const PiecewiseRHS rhs = build_rhs(scenario);
        const Vector y0 = initial_state(scenario);

        const BoundEstimates est = estimate_bounds(rhs, ts, scenario.t0, y0, th.a, th.b);
        const std::vector<Hypothesis> hyps{{"M", th.M, est.M, &est.M_at},
                                           {"N", th.N, est.N, &est.N_at},
                                           {"L", th.L, est.L, &est.L_at}};

        TheoremInputs in;
        in.a = th.a;
        in.b = th.b;
        in.M = th.M.value_or(est.M);
        in.N = th.N.value_or(est.N);
        in.L = th.L.value_or(est.L);
        in.epsilon = th.epsilon;
        in.t0 = scenario.t0;
        in.y0 = y0;

        ordered_json doc;
        doc["scenario"] = scenario.name;
        doc["inputs"] = ordered_json{{"a", in.a},      {"b", in.b}, {"M", in.M},   {"N", in.N},
                                     {"L", in.L},      {"epsilon", in.epsilon},   {"t0", in.t0},
                                     {"y0", vector_json(in.y0)}};
        ordered_json hj = ordered_json::array();
        for (const Hypothesis& h : hyps) hj.push_back(hypothesis_json(h));
        doc["hypotheses"] = std::move(hj);
        doc["samples"] = ordered_json{{"time", est.time_samples}, {"state", est.state_samples}};

        bool violated = false;
        for (const Hypothesis& h : hyps) {
            if (h.holds()) continue;
            violated = true;
            err << file.string() << ": hypothesis " << h.name << " fails: supplied " << format_number(*h.supplied)
                << ", sampled " << format_number(h.sampled);
            if (*h.witness) {
                err << " at t = " << format_number((*h.witness)->t) << ", y = [";
                const Vector& y = (*h.witness)->y;
                for (Eigen::Index i = 0; i < y.size(); ++i) err << (i ? ", " : "") << format_number(y[i]);
                err << "]";
            }
            err << "\n";
        }
        if (violated) {
            doc["status"] = "hypothesis_violation";
            out << doc.dump(2) << "\n";
            return kExitFailure;
        }

        PicardOptions opts;
        opts.max_iter = th.max_iter;
        opts.tolerance = th.tolerance;
        opts.mesh.nodes_per_unit = th.nodes_per_unit;
        const TheoremReport report = picard_run(ts, rhs, in, opts);

        doc["status"] = report.converged ? "converged" : "not_converged";
        doc["alpha"] = number_json(report.alpha);
        doc["interval"] = ordered_json{{"lo", report.interval.lo},
                                       {"hi", report.interval.hi},
                                       {"truncated_at_sigma", report.interval.truncated_at_sigma}};
        doc["convention"] = report.convention;
        doc["iterates"] = report.iterates;
        doc["converged"] = report.converged;
        doc["residual"] = report.residual;
        doc["contraction_bound"] = report.contraction_bound;
        doc["contraction_ratios"] = report.contraction_ratios;
        doc["solver_gap"] = report.solver_gap ? number_json(*report.solver_gap) : ordered_json(nullptr);
        doc["uniqueness_gap"] = report.uniqueness_gap ? number_json(*report.uniqueness_gap) : ordered_json(nullptr);
        doc["probe_iterates"] = report.probe_iterates;
        doc["mesh"] = report.mesh;
        ordered_json fp = ordered_json::array();
        for (const Vector& v : report.fixed_point) fp.push_back(vector_json(v));
        doc["fixed_point"] = std::move(fp);
        out << doc.dump(2) << "\n";

        if (!report.converged) {
            err << file.string() << ": Picard iteration did not certify a contraction after " << report.iterates
                << " iterates\n";
            return kExitFailure;
        }
        return kExitOk;
    });
}

namespace {

double scalar_rate(const Scenario& s) {
    const auto* lin = std::get_if<catalog::Linear>(&s.f);
    if (!lin || lin->rate.size() != 1 || !lin->forcing.empty() || s.y0.size() != 1) {
        throw Error(ErrorCode::InvalidArgument, "closed forms need a scalar state and f = linear with a scalar rate");
    }
    return lin->rate.front();
}

ClosedFormParams closed_form_params(const Scenario& s, std::string_view name) {
    ClosedFormParams p;
    p.lambda = scalar_rate(s);
    p.t0 = s.t0;
    p.y0 = s.y0.front();
    if (name == "hz-exp") {
        const auto* hz = std::get_if<spec::HIntegers>(&s.scale);
        if (!hz) throw Error(ErrorCode::InvalidArgument, "hz-exp needs an h_integers scale");
        p.h = hz->h;
    } else if (name == "pab-exp") {
        const auto* pab = std::get_if<spec::PeriodicUnion>(&s.scale);
        if (!pab) throw Error(ErrorCode::InvalidArgument, "pab-exp needs a periodic scale");
        p.a = pab->a;
        p.b = pab->b;
        const TimeScale ts = make_scale(s.scale);
        if (ts.find_piece(s.t0)->piece.lo != s.t0) {
            throw Error(ErrorCode::InvalidArgument, "pab-exp needs t0 at the start of a dense run");
        }
    }
    return p;
}

}  // namespace

int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(args.scenario, err, [&] {
        const Scenario scenario = load_scenario(args.scenario);
        const TimeScale ts = build_scale(scenario);
        const PiecewiseRHS rhs = build_rhs(scenario);
        const Vector y0 = initial_state(scenario);
        const double oracle_end = args.oracle_t_end.value_or(scenario.t_end);

        const Trajectory traj = solve_ivp(ts, rhs, scenario.t0, y0, scenario.t_end, scenario.options);

        std::vector<double> times;
        for (const Sample& s : traj.samples) {
            if (s.t <= oracle_end) times.push_back(s.t);
        }
        if (times.empty() || times.back() < oracle_end) times.push_back(oracle_end);

        OracleResult oracle;
        double tolerance = 0.0;
        ErrorMeasure measure = ErrorMeasure::Absolute;
        if (args.oracle == "recursion") {
            oracle = discrete_recursion(ts, rhs, scenario.t0, y0, oracle_end);
            tolerance = 1e-12;
            measure = ErrorMeasure::Relative;
        } else if (args.oracle == "reference") {
            const std::vector<Piece> segs = segments(ts, Window{scenario.t0, oracle_end});
            if (segs.size() != 1) {
                throw Error(ErrorCode::InvalidArgument, "the reference oracle needs [t0, t_end] inside one interval");
            }
            oracle = dense_reference(rhs.continuous, scenario.t0, y0, times);
            tolerance = 10.0 * scenario.options.rtol;
            measure = ErrorMeasure::Relative;
        } else if (args.oracle.rfind("closed-form:", 0) == 0) {
            const std::string name = args.oracle.substr(std::string_view("closed-form:").size());
            const ScaleFunction fn = closed_form(name, closed_form_params(scenario, name));
            oracle = sample_closed_form(fn, times);
            tolerance = 1e-6;
            measure = ErrorMeasure::Relative;
        } else {
            throw Error(ErrorCode::UnknownEntry, "unknown oracle '" + args.oracle + "'");
        }
        tolerance = args.tolerance.value_or(tolerance);
        measure = args.measure.value_or(measure);

        const DivergenceReport report = compare(traj, oracle, args.norm, tolerance, measure);
        std::size_t worst = 0;
        for (std::size_t i = 1; i < report.pointwise.size(); ++i) {
            if (report.pointwise[i] > report.pointwise[worst]) worst = i;
        }

        ordered_json doc;
        doc["scenario"] = scenario.name;
        doc["oracle"] = args.oracle;
        doc["method"] = std::string(to_string(oracle.method));
        doc["exact"] = oracle.guaranteed_exact;
        doc["norm"] = args.norm == Norm::Sup ? "sup" : "l2";
        doc["measure"] = measure == ErrorMeasure::Absolute ? "absolute" : "relative";
        doc["tolerance"] = tolerance;
        doc["samples"] = report.pointwise.size();
        doc["sup"] = report.sup;
        doc["l2"] = report.l2;
        if (!report.pointwise.empty()) {
            doc["worst"] = ordered_json{{"t", traj.samples[worst].t}, {"error", report.pointwise[worst]}};
        }
        doc["pass"] = report.pass;
        out << doc.dump(2) << "\n";
        if (!report.pass) {
            err << args.scenario.string() << ": divergence " << format_number(args.norm == Norm::Sup ? report.sup : report.l2)
                << " exceeds tolerance " << format_number(tolerance) << "\n";
            return kExitFailure;
        }
        return kExitOk;
    });
}

}  // namespace chronoscale::cli
