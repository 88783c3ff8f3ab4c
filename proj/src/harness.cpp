#include "corrtensor/harness.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "corrtensor/dualreg.hpp"
#include "corrtensor/localreg.hpp"
#include "corrtensor/maxcorr.hpp"
#include "corrtensor/membership.hpp"
#include "corrtensor/optimizer.hpp"

namespace corrtensor {

namespace {

constexpr double kBand = 1e-3;       // exclusion band around search-based verdicts
constexpr double kCertSlack = 1e-9;  // slack on certified lower-bound sides

}  // namespace

Measure measure_from_string(const std::string& name) {
    if (name == "rho") return Measure::Rho;
    if (name == "hc_aux") return Measure::HcAux;
    if (name == "lambda_region") return Measure::LambdaRegion;
    if (name == "g_helper") return Measure::GHelper;
    if (name == "g_side_info") return Measure::GSideInfo;
    if (name == "g_fork") return Measure::GFork;
    throw IndexOutOfRange("unknown measure: " + name);
}

std::string measure_name(Measure measure) {
    switch (measure) {
        case Measure::Rho: return "rho";
        case Measure::HcAux: return "hc_aux";
        case Measure::LambdaRegion: return "lambda_region";
        case Measure::GHelper: return "g_helper";
        case Measure::GSideInfo: return "g_side_info";
        case Measure::GFork: return "g_fork";
    }
    return "?";
}

JointDistribution grouped_product(const JointDistribution& p, const JointDistribution& q) {
    if (p.num_variables() != q.num_variables())
        throw DimensionMismatch("factors must have the same number of variables");
    const int k = p.num_variables();
    std::vector<int> cards(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        cards[static_cast<std::size_t>(i)] = p.cardinality(i) * q.cardinality(i);

    std::size_t total = p.size() * q.size();
    std::vector<double> probs(total, 0.0);
    std::vector<int> composite(static_cast<std::size_t>(k));
    for (std::size_t cp = 0; cp < p.size(); ++cp) {
        if (p[cp] == 0.0) continue;
        std::vector<int> ip = p.unflatten(cp);
        for (std::size_t cq = 0; cq < q.size(); ++cq) {
            std::vector<int> iq = q.unflatten(cq);
            std::size_t flat = 0;
            for (int i = 0; i < k; ++i) {
                composite[static_cast<std::size_t>(i)] =
                    ip[static_cast<std::size_t>(i)] * q.cardinality(i) +
                    iq[static_cast<std::size_t>(i)];
                flat = flat * static_cast<std::size_t>(cards[static_cast<std::size_t>(i)]) +
                       static_cast<std::size_t>(composite[static_cast<std::size_t>(i)]);
            }
            probs[flat] = p[cp] * q[cq];
        }
    }
    return JointDistribution(std::move(cards), std::move(probs));
}

JointDistribution grouped_power(const JointDistribution& p, int n, std::size_t entry_cap) {
    if (n < 1) throw IndexOutOfRange("power must be at least 1");
    double entries = static_cast<double>(p.size());
    for (int c = 1; c < n; ++c) {
        entries *= static_cast<double>(p.size());
        if (entries > static_cast<double>(entry_cap))
            throw SizeCapExceeded("i.i.d. power exceeds the entry cap");
    }
    JointDistribution acc = p;
    for (int c = 1; c < n; ++c) acc = grouped_product(acc, p);
    return acc;
}

namespace {

int helper_of(Measure measure, const JointDistribution& dist) {
    switch (measure) {
        case Measure::HcAux: return -1;
        case Measure::Rho: return -1;  // unused
        default: return dist.num_variables() - 1;
    }
}

int lambda_dim(Measure measure, int k) {
    switch (measure) {
        case Measure::Rho: return 0;
        case Measure::HcAux: return k;
        case Measure::GHelper: return 1;
        case Measure::GFork: return 2;
        default: return k - 1;  // lambda_region, g_side_info
    }
}

AuxObjective make_objective(Measure measure, const JointDistribution& dist,
                            const std::vector<double>& lambda) {
    switch (measure) {
        case Measure::HcAux: return make_side_info_objective(dist, -1, lambda);
        case Measure::GSideInfo:
            return make_side_info_objective(dist, dist.num_variables() - 1, lambda);
        case Measure::GHelper: {
            int j = dist.num_variables() - 1;
            return AuxObjective(dist, j, {{{0}, lambda[0]}, {{j}, -1.0}});
        }
        case Measure::GFork:
            return make_fork_objective(dist, lambda[0], lambda[1], ForkForm::Corner);
        default: throw IndexOutOfRange("measure has no auxiliary objective");
    }
}

bool uses_objective(Measure measure) {
    return measure == Measure::HcAux || measure == Measure::GHelper ||
           measure == Measure::GSideInfo || measure == Measure::GFork;
}

// exhaustive channel-grid schedule per helper alphabet; empty = unavailable
std::vector<std::pair<int, double>> grid_schedule(int rows) {
    switch (rows) {
        case 2: return {{2, 0.02}, {3, 0.02}, {4, 0.05}};
        case 3: return {{2, 0.05}, {3, 0.1}, {4, 0.2}};
        case 4: return {{2, 0.05}, {3, 0.2}, {4, 0.25}};
        default: return {};
    }
}

bool oracle_available(Measure measure, const JointDistribution& dist) {
    if (!uses_objective(measure)) return true;  // spectral / eigen routes are exact
    int rows = helper_of(measure, dist) < 0 ? static_cast<int>(dist.size())
                                            : dist.cardinality(dist.num_variables() - 1);
    return !grid_schedule(rows).empty();
}

AuxChannel pad_channel(const AuxChannel& w, int cols) {
    if (w.cols >= cols) return w;
    AuxChannel out{w.rows, cols, std::vector<double>(static_cast<std::size_t>(w.rows * cols), 0.0)};
    for (int h = 0; h < w.rows; ++h)
        for (int u = 0; u < w.cols; ++u) out.at(h, u) = w.at(h, u);
    return out;
}

// channel on the grouped product whose U = (U1, U2) with U_j from the factor
// maximizers; rows follow the grouped helper indexing
AuxChannel tensor_seed(int helper_index, const JointDistribution& p, const JointDistribution& q,
                       const JointDistribution& grouped, const AuxChannel& w1,
                       const AuxChannel& w2) {
    int rows = helper_index < 0 ? static_cast<int>(grouped.size())
                                : grouped.cardinality(helper_index);
    AuxChannel out{rows, w1.cols * w2.cols,
                   std::vector<double>(static_cast<std::size_t>(rows * w1.cols * w2.cols), 0.0)};
    for (int h = 0; h < rows; ++h) {
        int hp, hq;
        if (helper_index < 0) {
            std::vector<int> composite = grouped.unflatten(static_cast<std::size_t>(h));
            std::vector<int> ip(composite.size()), iq(composite.size());
            for (std::size_t i = 0; i < composite.size(); ++i) {
                int cq = q.cardinality(static_cast<int>(i));
                ip[i] = composite[i] / cq;
                iq[i] = composite[i] % cq;
            }
            hp = static_cast<int>(p.flat_index(ip));
            hq = static_cast<int>(q.flat_index(iq));
        } else {
            int cq = q.cardinality(helper_index);
            hp = h / cq;
            hq = h % cq;
        }
        for (int u1 = 0; u1 < w1.cols; ++u1)
            for (int u2 = 0; u2 < w2.cols; ++u2)
                out.at(h, u1 * w2.cols + u2) = w1.at(hp, u1) * w2.at(hq, u2);
    }
    return out;
}

struct MeasureEval {
    double value = 0.0;  // measure value, G value, or membership margin
    bool member = true;
    AuxChannel maximizer;
    bool has_maximizer = false;
};

// best-found value: deterministic seeds + restarts + optional extra seeds +
// exhaustive grid when the helper alphabet admits one
MeasureEval eval_measure(Measure measure, const JointDistribution& dist,
                         const std::vector<double>& lambda, std::uint64_t seed,
                         const std::vector<AuxChannel>& extra_seeds, bool with_grid) {
    MeasureEval out;
    if (measure == Measure::Rho) {
        out.value = rho(dist, 0, 1);
        return out;
    }
    if (measure == Measure::LambdaRegion) {
        MembershipResult r = lambda_member(dist, dist.num_variables() - 1, lambda);
        out.value = r.margin;
        out.member = r.is_member();
        return out;
    }
    int helper = helper_of(measure, dist);
    AuxObjective objective = make_objective(measure, dist, lambda);
    OptimOptions options;
    options.seed = seed;
    options.aux_cardinality = objective.helper_alphabet() + 1;
    options.seeds = side_info_seeds(dist, helper, options.aux_cardinality);
    for (const AuxChannel& w : extra_seeds) {
        options.aux_cardinality = std::max(options.aux_cardinality, w.cols);
    }
    for (AuxChannel& w : options.seeds) w = pad_channel(w, options.aux_cardinality);
    for (const AuxChannel& w : extra_seeds)
        options.seeds.push_back(pad_channel(w, options.aux_cardinality));

    OptimResult res = maximize_aux(objective, options);
    out.value = res.value;
    out.maximizer = std::move(res.maximizer);
    out.has_maximizer = true;
    if (with_grid) {
        auto schedule = grid_schedule(objective.helper_alphabet());
        if (!schedule.empty()) {
            GridResult grid = grid_max_over(objective, schedule);
            if (grid.value > out.value) {
                out.value = grid.value;
                out.maximizer = std::move(grid.maximizer);
            }
        }
    }
    out.member = out.value <= kMembershipTol;
    return out;
}

std::vector<double> sample_lambda(int index, int dim) { return halton_point(index, dim, 1.5); }

void finalize(PropertyReport& report, double tol) {
    report.tolerance = tol;
    report.max_violation = 0.0;
    for (const SampleRecord& s : report.samples)
        if (!s.excluded) report.max_violation = std::max(report.max_violation, s.violation);
    report.passed = report.max_violation <= tol;
}

}  // namespace

PropertyReport check_tensorization(Measure measure, const JointDistribution& p, int n,
                                   int lambda_samples, double tol, std::uint64_t seed) {
    PropertyReport report;
    report.measure = measure_name(measure);
    report.property = "tensorization";
    report.seed = seed;
    const int k = p.num_variables();
    JointDistribution pn = grouped_power(p, n);
    const bool oracle = oracle_available(measure, p) && oracle_available(measure, pn);
    report.oracle_mode = uses_objective(measure) ? (oracle ? "exhaustive" : "heuristic") : "exact";

    if (measure == Measure::Rho) {
        SampleRecord s;
        s.value_base = rho(p, 0, 1);
        s.value_other = rho(pn, 0, 1);
        s.violation = std::abs(s.value_base - s.value_other);
        report.samples.push_back(s);
        finalize(report, tol);
        return report;
    }

    const int dim = lambda_dim(measure, k);
    for (int si = 0; si < lambda_samples; ++si) {
        SampleRecord s;
        s.lambda = sample_lambda(si, dim);
        if (measure == Measure::LambdaRegion) {
            MeasureEval base = eval_measure(measure, p, s.lambda, seed, {}, false);
            MeasureEval other = eval_measure(measure, pn, s.lambda, seed, {}, false);
            s.value_base = base.value;
            s.value_other = other.value;
            s.verdict_base = base.member;
            s.verdict_other = other.member;
            s.violation = base.member == other.member ? 0.0 : 1.0;
        } else if (measure == Measure::HcAux) {
            MeasureEval base = eval_measure(measure, p, s.lambda, seed, {}, oracle);
            std::vector<AuxChannel> seeds;
            if (base.has_maximizer) {
                JointDistribution acc = p;
                AuxChannel w = base.maximizer;
                for (int c = 1; c < n; ++c) {
                    JointDistribution next = grouped_product(acc, p);
                    w = tensor_seed(-1, acc, p, next, w, base.maximizer);
                    acc = std::move(next);
                }
                seeds.push_back(std::move(w));
            }
            MeasureEval other = eval_measure(measure, pn, s.lambda, seed, seeds, false);
            s.value_base = base.value;
            s.value_other = other.value;
            s.verdict_base = base.member;
            s.verdict_other = other.member;
            s.excluded = std::abs(base.value) <= kBand || std::abs(other.value) <= kBand;
            s.violation = base.member == other.member ? 0.0 : 1.0;
        } else {
            // G-type: additivity on the i.i.d. power
            MeasureEval base = eval_measure(measure, p, s.lambda, seed, {}, oracle);
            std::vector<AuxChannel> seeds;
            int helper = p.num_variables() - 1;
            if (base.has_maximizer) {
                JointDistribution acc = p;
                AuxChannel w = base.maximizer;
                for (int c = 1; c < n; ++c) {
                    JointDistribution next = grouped_product(acc, p);
                    w = tensor_seed(helper, acc, p, next, w, base.maximizer);
                    acc = std::move(next);
                }
                seeds.push_back(std::move(w));
            }
            MeasureEval other = eval_measure(measure, pn, s.lambda, seed, seeds, oracle);
            s.value_base = n * base.value;
            s.value_other = other.value;
            double cert = std::max(0.0, s.value_base - s.value_other);
            double upper = oracle ? std::max(0.0, s.value_other - s.value_base) : 0.0;
            s.violation = std::max(cert > kCertSlack ? cert : 0.0, upper);
        }
        report.samples.push_back(std::move(s));
    }
    finalize(report, tol);
    return report;
}

PropertyReport check_data_processing(Measure measure, const JointDistribution& p,
                                     const std::vector<Channel>& channels, int lambda_samples,
                                     double tol, std::uint64_t seed) {
    PropertyReport report;
    report.measure = measure_name(measure);
    report.property = "data_processing";
    report.seed = seed;
    const int k = p.num_variables();
    if (static_cast<int>(channels.size()) != k)
        throw DimensionMismatch("one channel per variable required");

    const int helper = helper_of(measure, p);
    if (helper >= 0) {
        // the dual functionals condition U on the helper, so the helper must
        // pass through unchanged
        const Channel& hc = channels[static_cast<std::size_t>(helper)];
        if (hc.input_cardinalities() != hc.output_cardinalities())
            throw DimensionMismatch("helper channel must preserve the alphabet");
        for (std::size_t r = 0; r < hc.num_inputs(); ++r)
            for (std::size_t c = 0; c < hc.num_outputs(); ++c)
                if (std::abs(hc.kernel()[r][c] - (r == c ? 1.0 : 0.0)) > 1e-12)
                    throw DimensionMismatch("helper channel must be the identity");
    }

    JointDistribution after = p;
    for (int i = 0; i < k; ++i) after = apply_local_channel(after, channels[static_cast<std::size_t>(i)], i);
    const bool oracle = oracle_available(measure, p) && oracle_available(measure, after);
    report.oracle_mode = uses_objective(measure) ? (oracle ? "exhaustive" : "heuristic") : "exact";

    if (measure == Measure::Rho) {
        SampleRecord s;
        s.value_base = rho(p, 0, 1);
        s.value_other = rho(after, 0, 1);
        s.violation = std::max(0.0, s.value_other - s.value_base);
        report.samples.push_back(s);
        finalize(report, tol);
        return report;
    }

    const int dim = lambda_dim(measure, k);
    for (int si = 0; si < lambda_samples; ++si) {
        SampleRecord s;
        s.lambda = sample_lambda(si, dim);
        MeasureEval av = eval_measure(measure, after, s.lambda, seed, {}, oracle);
        if (measure == Measure::LambdaRegion) {
            MeasureEval bv = eval_measure(measure, p, s.lambda, seed, {}, false);
            s.value_base = bv.value;
            s.value_other = av.value;
            s.verdict_base = bv.member;
            s.verdict_other = av.member;
            s.violation = (bv.member && !av.member) ? 1.0 : 0.0;
        } else if (measure == Measure::HcAux) {
            MeasureEval bv = eval_measure(measure, p, s.lambda, seed, {}, oracle);
            s.value_base = bv.value;
            s.value_other = av.value;
            s.verdict_base = bv.member;
            s.verdict_other = av.member;
            s.excluded = std::abs(bv.value) <= kBand || std::abs(av.value) <= kBand;
            s.violation = (bv.member && !av.member) ? 1.0 : 0.0;
        } else {
            // seed the before-side with the after-side maximizer: the helper
            // is unchanged, so the same channel certifies before >= after
            std::vector<AuxChannel> seeds;
            if (av.has_maximizer) seeds.push_back(av.maximizer);
            MeasureEval bv = eval_measure(measure, p, s.lambda, seed, seeds, oracle);
            s.value_base = bv.value;
            s.value_other = av.value;
            s.violation = std::max(0.0, av.value - bv.value);
        }
        report.samples.push_back(std::move(s));
    }
    finalize(report, tol);
    return report;
}

PropertyReport check_additivity(Measure measure, const JointDistribution& p,
                                const JointDistribution& q, int lambda_samples, double tol,
                                std::uint64_t seed) {
    PropertyReport report;
    report.measure = measure_name(measure);
    report.property = "additivity";
    report.seed = seed;
    const int k = p.num_variables();
    if (q.num_variables() != k) throw DimensionMismatch("factor arity mismatch");
    JointDistribution pq = grouped_product(p, q);
    const bool oracle = oracle_available(measure, p) && oracle_available(measure, q) &&
                        oracle_available(measure, pq);
    report.oracle_mode = uses_objective(measure) ? (oracle ? "exhaustive" : "heuristic") : "exact";

    if (measure == Measure::Rho) {
        SampleRecord s;
        s.value_base = std::max(rho(p, 0, 1), rho(q, 0, 1));
        s.value_other = rho(pq, 0, 1);
        s.violation = std::abs(s.value_base - s.value_other);
        report.samples.push_back(s);
        finalize(report, tol);
        return report;
    }

    const int dim = lambda_dim(measure, k);
    const int helper = helper_of(measure, p);
    for (int si = 0; si < lambda_samples; ++si) {
        SampleRecord s;
        s.lambda = sample_lambda(si, dim);
        MeasureEval vp = eval_measure(measure, p, s.lambda, seed, {}, oracle);
        MeasureEval vq = eval_measure(measure, q, s.lambda, seed, {}, oracle);
        if (measure == Measure::LambdaRegion) {
            MeasureEval vpq = eval_measure(measure, pq, s.lambda, seed, {}, false);
            s.value_base = std::max(vp.value, vq.value);
            s.value_other = vpq.value;
            s.verdict_base = vp.member && vq.member;
            s.verdict_other = vpq.member;
            s.violation = s.verdict_base == s.verdict_other ? 0.0 : 1.0;
        } else {
            std::vector<AuxChannel> seeds;
            if (vp.has_maximizer && vq.has_maximizer)
                seeds.push_back(tensor_seed(helper, p, q, pq, vp.maximizer, vq.maximizer));
            MeasureEval vpq = eval_measure(measure, pq, s.lambda, seed, seeds, oracle);
            if (measure == Measure::HcAux) {
                s.value_base = vp.value + vq.value;
                s.value_other = vpq.value;
                s.verdict_base = vp.member && vq.member;
                s.verdict_other = vpq.member;
                s.excluded = std::abs(vp.value) <= kBand || std::abs(vq.value) <= kBand ||
                             std::abs(vpq.value) <= kBand;
                s.violation = s.verdict_base == s.verdict_other ? 0.0 : 1.0;
            } else {
                s.value_base = vp.value + vq.value;
                s.value_other = vpq.value;
                double cert = std::max(0.0, s.value_base - s.value_other);
                double upper = oracle ? std::max(0.0, s.value_other - s.value_base) : 0.0;
                s.violation = std::max(cert > kCertSlack ? cert : 0.0, upper);
            }
        }
        report.samples.push_back(std::move(s));
    }
    finalize(report, tol);
    return report;
}

}  // namespace corrtensor
