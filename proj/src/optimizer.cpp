#include "corrtensor/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace corrtensor {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kLogFloor = -60.0;  // nats; stands in for log(0) at the boundary

double safe_log_ratio(double num, double den) {
    if (num <= 0.0) return kLogFloor;
    if (den <= 0.0) return -kLogFloor;
    return std::log(num / den);
}

}  // namespace

AuxChannel AuxChannel::constant(int rows, int cols) {
    AuxChannel c{rows, cols, std::vector<double>(static_cast<std::size_t>(rows * cols), 0.0)};
    for (int h = 0; h < rows; ++h) c.at(h, 0) = 1.0;
    return c;
}

AuxChannel AuxChannel::deterministic(int rows, int cols, const std::vector<int>& map) {
    AuxChannel c{rows, cols, std::vector<double>(static_cast<std::size_t>(rows * cols), 0.0)};
    for (int h = 0; h < rows; ++h) c.at(h, map[static_cast<std::size_t>(h)] % cols) = 1.0;
    return c;
}

void project_simplex(std::vector<double>& v) {
    // Euclidean projection onto {x >= 0, sum x = 1} (sort-based).
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0;
    double theta = 0.0;
    int rho = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) {
            rho = static_cast<int>(i + 1);
            theta = t;
        }
    }
    (void)rho;
    for (double& x : v) x = std::max(x - theta, 0.0);
}

AuxObjective::AuxObjective(const JointDistribution& dist, int helper_index,
                           std::vector<std::pair<std::vector<int>, double>> terms,
                           double constant)
    : constant_(constant) {
    const int k = dist.num_variables();
    if (helper_index >= k) throw IndexOutOfRange("helper index out of range");

    const auto& probs = dist.probabilities();
    // helper symbol per cell
    std::vector<std::size_t> helper_of_cell(probs.size());
    if (helper_index < 0) {
        helper_card_ = static_cast<int>(probs.size());
        for (std::size_t c = 0; c < probs.size(); ++c) helper_of_cell[c] = c;
    } else {
        helper_card_ = dist.cardinality(helper_index);
        for (std::size_t c = 0; c < probs.size(); ++c)
            helper_of_cell[c] = static_cast<std::size_t>(dist.unflatten(c)[helper_index]);
    }

    helper_prob_.assign(static_cast<std::size_t>(helper_card_), 0.0);
    for (std::size_t c = 0; c < probs.size(); ++c) helper_prob_[helper_of_cell[c]] += probs[c];

    for (auto& [subset, coeff] : terms) {
        Term term;
        term.coeff = coeff;
        std::size_t t_card = 1;
        for (int i : subset) t_card *= static_cast<std::size_t>(dist.cardinality(i));
        term.t_card = static_cast<int>(t_card);
        term.joint.assign(t_card * static_cast<std::size_t>(helper_card_), 0.0);
        term.marginal.assign(t_card, 0.0);
        for (std::size_t c = 0; c < probs.size(); ++c) {
            if (probs[c] == 0.0) continue;
            std::vector<int> cell = dist.unflatten(c);
            std::size_t t = 0;
            for (int i : subset)
                t = t * static_cast<std::size_t>(dist.cardinality(i)) +
                    static_cast<std::size_t>(cell[static_cast<std::size_t>(i)]);
            term.joint[t * static_cast<std::size_t>(helper_card_) + helper_of_cell[c]] += probs[c];
            term.marginal[t] += probs[c];
        }
        terms_.push_back(std::move(term));
    }
}

std::vector<double> AuxObjective::output_marginal(const AuxChannel& channel) const {
    std::vector<double> q(static_cast<std::size_t>(channel.cols), 0.0);
    for (int h = 0; h < channel.rows; ++h) {
        double ph = helper_prob_[static_cast<std::size_t>(h)];
        if (ph == 0.0) continue;
        for (int u = 0; u < channel.cols; ++u) q[static_cast<std::size_t>(u)] += ph * channel.at(h, u);
    }
    return q;
}

double AuxObjective::term_mi(const Term& term, const AuxChannel& channel,
                             const std::vector<double>& q) const {
    const int H = helper_card_;
    const int U = channel.cols;
    double mi = 0.0;
    for (int t = 0; t < term.t_card; ++t) {
        double pt = term.marginal[static_cast<std::size_t>(t)];
        if (pt == 0.0) continue;
        const double* row = term.joint.data() + static_cast<std::size_t>(t) * static_cast<std::size_t>(H);
        for (int u = 0; u < U; ++u) {
            double ptu = 0.0;
            for (int h = 0; h < H; ++h) ptu += row[h] * channel.at(h, u);
            if (ptu > 0.0) mi += ptu * std::log(ptu / (pt * q[static_cast<std::size_t>(u)]));
        }
    }
    return std::max(mi, 0.0) / kLn2;
}

double AuxObjective::value(const AuxChannel& channel) const {
    std::vector<double> q = output_marginal(channel);
    double v = constant_;
    for (const Term& term : terms_) v += term.coeff * term_mi(term, channel, q);
    return v;
}

double AuxObjective::term_information(const AuxChannel& channel, std::size_t t) const {
    std::vector<double> q = output_marginal(channel);
    return term_mi(terms_[t], channel, q);
}

void AuxObjective::gradient(const AuxChannel& channel, std::vector<double>& grad) const {
    const int H = helper_card_;
    const int U = channel.cols;
    grad.assign(static_cast<std::size_t>(H * U), 0.0);
    std::vector<double> q = output_marginal(channel);

    for (const Term& term : terms_) {
        if (term.coeff == 0.0) continue;
        for (int t = 0; t < term.t_card; ++t) {
            const double* row = term.joint.data() + static_cast<std::size_t>(t) * static_cast<std::size_t>(H);
            for (int u = 0; u < U; ++u) {
                double ptu = 0.0;
                for (int h = 0; h < H; ++h) ptu += row[h] * channel.at(h, u);
                double lg = safe_log_ratio(ptu, q[static_cast<std::size_t>(u)]);
                for (int h = 0; h < H; ++h) {
                    if (row[h] == 0.0) continue;
                    grad[static_cast<std::size_t>(h * U + u)] += term.coeff * row[h] * lg;
                }
            }
        }
    }
    for (double& g : grad) g /= kLn2;
}

namespace {

struct AscentOutcome {
    double value;
    AuxChannel channel;
    long long iterations;
};

template <typename Value, typename Gradient>
AscentOutcome projected_gradient_ascent(AuxChannel w, const Value& value_fn,
                                        const Gradient& grad_fn, int max_iterations,
                                        double gradient_tolerance) {
    const int H = w.rows, U = w.cols;
    std::vector<double> grad;
    std::vector<double> row(static_cast<std::size_t>(U));
    double step = 0.5;
    double value = value_fn(w);
    long long iters = 0;

    for (int it = 0; it < max_iterations; ++it) {
        ++iters;
        grad_fn(w, grad);
        bool accepted = false;
        AuxChannel trial = w;
        double trial_value = value;
        while (step >= 1e-12) {
            trial = w;
            for (int h = 0; h < H; ++h) {
                for (int u = 0; u < U; ++u)
                    row[static_cast<std::size_t>(u)] =
                        w.at(h, u) + step * grad[static_cast<std::size_t>(h * U + u)];
                project_simplex(row);
                for (int u = 0; u < U; ++u) trial.at(h, u) = row[static_cast<std::size_t>(u)];
            }
            trial_value = value_fn(trial);
            if (trial_value >= value - 1e-15) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        double move = 0.0;
        for (std::size_t i = 0; i < w.w.size(); ++i) {
            double d = trial.w[i] - w.w[i];
            move += d * d;
        }
        move = std::sqrt(move);
        bool no_gain = trial_value - value < 1e-14;
        w = trial;
        value = trial_value;
        if (move / step < gradient_tolerance || (no_gain && move < 1e-13)) break;
        step *= 1.25;
    }
    return {value, std::move(w), iters};
}

std::vector<AuxChannel> build_starts(int rows, int cols, const OptimOptions& options) {
    std::vector<AuxChannel> starts = options.seeds;
    // standing deterministic starts: constant U and u = h (mod |U|)
    starts.push_back(AuxChannel::constant(rows, cols));
    std::vector<int> ident(static_cast<std::size_t>(rows));
    for (int h = 0; h < rows; ++h) ident[static_cast<std::size_t>(h)] = h;
    starts.push_back(AuxChannel::deterministic(rows, cols, ident));

    std::mt19937_64 rng(options.seed * 0x9e3779b97f4a7c15ULL + 0x2545F4914F6CDD1DULL);
    while (static_cast<int>(starts.size()) < options.restarts)
        starts.push_back(random_channel(rng, rows, cols));
    return starts;
}

}  // namespace

OptimResult maximize_aux(const AuxObjective& objective, const OptimOptions& options) {
    const int rows = objective.helper_alphabet();
    const int cols = options.aux_cardinality;
    std::vector<AuxChannel> starts = build_starts(rows, cols, options);

    OptimResult best;
    best.value = -std::numeric_limits<double>::infinity();
    for (const AuxChannel& start : starts) {
        AscentOutcome out = projected_gradient_ascent(
            start, [&](const AuxChannel& w) { return objective.value(w); },
            [&](const AuxChannel& w, std::vector<double>& g) { objective.gradient(w, g); },
            options.max_iterations, options.gradient_tolerance);
        best.iterations += out.iterations;
        ++best.restarts_used;
        if (out.value > best.value) {
            best.value = out.value;
            best.maximizer = std::move(out.channel);
        }
    }
    best.value = objective.value(best.maximizer);  // recomputable from the maximizer
    return best;
}

OptimResult ascend_from(const AuxObjective& objective, const AuxChannel& start,
                        int max_iterations, double gradient_tolerance) {
    AscentOutcome out = projected_gradient_ascent(
        start, [&](const AuxChannel& w) { return objective.value(w); },
        [&](const AuxChannel& w, std::vector<double>& g) { objective.gradient(w, g); },
        max_iterations, gradient_tolerance);
    OptimResult res;
    res.maximizer = std::move(out.channel);
    res.value = objective.value(res.maximizer);
    res.restarts_used = 1;
    res.iterations = out.iterations;
    return res;
}

RatioResult maximize_ratio(const AuxObjective& numerator, const AuxObjective& denominator,
                           const OptimOptions& options, double denominator_floor) {
    const int rows = numerator.helper_alphabet();
    const int cols = options.aux_cardinality;
    std::vector<AuxChannel> starts = build_starts(rows, cols, options);

    auto ratio = [&](const AuxChannel& w) {
        double den = denominator.value(w);
        if (den < denominator_floor) return -std::numeric_limits<double>::infinity();
        return numerator.value(w) / den;
    };
    auto ratio_grad = [&](const AuxChannel& w, std::vector<double>& g) {
        double num = numerator.value(w);
        double den = denominator.value(w);
        std::vector<double> gn, gd;
        numerator.gradient(w, gn);
        denominator.gradient(w, gd);
        g.resize(gn.size());
        double den2 = std::max(den * den, 1e-18);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = (gn[i] * den - num * gd[i]) / den2;
    };

    RatioResult best;
    best.value = 0.0;
    for (const AuxChannel& start : starts) {
        if (denominator.value(start) < denominator_floor) continue;
        AscentOutcome out = projected_gradient_ascent(start, ratio, ratio_grad,
                                                      options.max_iterations,
                                                      options.gradient_tolerance);
        double v = ratio(out.channel);
        if (std::isfinite(v) && (!best.found || v > best.value)) {
            best.value = v;
            best.maximizer = std::move(out.channel);
            best.found = true;
        }
    }
    return best;
}

namespace {

void enumerate_simplex_rows(int dim, int ticks, std::vector<std::vector<double>>& out) {
    std::vector<int> counts(static_cast<std::size_t>(dim), 0);
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == dim - 1) {
            counts[static_cast<std::size_t>(pos)] = remaining;
            std::vector<double> row(static_cast<std::size_t>(dim));
            for (int i = 0; i < dim; ++i)
                row[static_cast<std::size_t>(i)] =
                    static_cast<double>(counts[static_cast<std::size_t>(i)]) / ticks;
            out.push_back(std::move(row));
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            counts[static_cast<std::size_t>(pos)] = c;
            rec(pos + 1, remaining - c);
        }
    };
    rec(0, ticks);
}

}  // namespace

GridResult grid_maximize(const std::function<double(const AuxChannel&)>& objective, int rows,
                         int aux_cardinality, double step) {
    int ticks = static_cast<int>(std::lround(1.0 / step));
    std::vector<std::vector<double>> points;
    enumerate_simplex_rows(aux_cardinality, ticks, points);

    GridResult best;
    best.value = -std::numeric_limits<double>::infinity();
    AuxChannel w{rows, aux_cardinality,
                 std::vector<double>(static_cast<std::size_t>(rows * aux_cardinality), 0.0)};
    std::vector<std::size_t> choice(static_cast<std::size_t>(rows), 0);

    std::function<void(int)> rec = [&](int r) {
        if (r == rows) {
            double v = objective(w);
            ++best.evaluations;
            if (v > best.value) {
                best.value = v;
                best.maximizer = w;
            }
            return;
        }
        for (std::size_t i = 0; i < points.size(); ++i) {
            for (int u = 0; u < aux_cardinality; ++u) w.at(r, u) = points[i][static_cast<std::size_t>(u)];
            rec(r + 1);
        }
    };
    rec(0);
    return best;
}

// ---- randomness ------------------------------------------------------------

std::vector<double> random_simplex_point(std::mt19937_64& rng, int dim) {
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> v(static_cast<std::size_t>(dim));
    double total = 0.0;
    for (double& x : v) {
        x = expo(rng);
        total += x;
    }
    for (double& x : v) x /= total;
    return v;
}

AuxChannel random_channel(std::mt19937_64& rng, int rows, int cols) {
    AuxChannel c{rows, cols, {}};
    c.w.reserve(static_cast<std::size_t>(rows * cols));
    for (int h = 0; h < rows; ++h) {
        std::vector<double> row = random_simplex_point(rng, cols);
        c.w.insert(c.w.end(), row.begin(), row.end());
    }
    return c;
}

JointDistribution random_distribution(std::mt19937_64& rng, const std::vector<int>& cards) {
    std::size_t n = 1;
    for (int c : cards) n *= static_cast<std::size_t>(c);
    std::vector<double> probs = random_simplex_point(rng, static_cast<int>(n));
    return JointDistribution(cards, std::move(probs));
}

Channel random_local_channel(std::mt19937_64& rng, int in_card, int out_card) {
    std::vector<std::vector<double>> kernel;
    kernel.reserve(static_cast<std::size_t>(in_card));
    for (int i = 0; i < in_card; ++i) kernel.push_back(random_simplex_point(rng, out_card));
    return Channel({in_card}, {out_card}, std::move(kernel));
}

std::vector<double> halton_point(int index, int dim, double scale) {
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    std::vector<double> point(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) {
        int base = primes[d % 8];
        double f = 1.0, r = 0.0;
        int i = index + 1;
        while (i > 0) {
            f /= base;
            r += f * (i % base);
            i /= base;
        }
        point[static_cast<std::size_t>(d)] = r * scale;
    }
    return point;
}

}  // namespace corrtensor
