#include "hjbqvi/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hjbqvi/discretize.hpp"

namespace hjbqvi {

namespace {

double eval_named(const ScalarField& f, double x, const char* what, std::size_t regime,
                  std::size_t control) {
    if (!f) {
        std::ostringstream os;
        os << "coefficient " << what << " (regime " << regime + 1 << ", control " << control
           << ") is not set";
        throw ModelError(os.str());
    }
    double v;
    try {
        v = f(x);
    } catch (const std::exception& e) {
        std::ostringstream os;
        os << "coefficient " << what << " (regime " << regime + 1 << ", control " << control
           << ") failed at x = " << x << ": " << e.what();
        throw ModelError(os.str());
    }
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "coefficient " << what << " (regime " << regime + 1 << ", control " << control
           << ") is not finite at x = " << x;
        throw ModelError(os.str());
    }
    return v;
}

}  // namespace

double SwitchingCosts::eval(std::size_t i, std::size_t j, double x) const {
    if (i == j) return 0.0;
    const auto& f = cost[i][j];
    if (!f) throw ModelError("switching cost k_" + std::to_string(i + 1) + std::to_string(j + 1) +
                             " is not set");
    return f(x);
}

void SwitchingProblem::check_consistent() const {
    if (regime_count < 1) throw ModelError("regime_count must be >= 1");
    if (!(x_lo < x_hi)) throw ModelError("domain requires x_lo < x_hi");
    if (coefficients.entries.size() != regime_count) {
        throw ModelError("coefficient set does not cover every regime");
    }
    if (boundary_values.size() != regime_count) {
        throw ModelError("one Dirichlet boundary value per regime required");
    }
    if (control_grid.size() != regime_count) {
        throw ModelError("one control sample grid per regime required");
    }
    for (std::size_t i = 0; i < regime_count; ++i) {
        if (coefficients.entries[i].empty() || control_grid[i].empty()) {
            throw ModelError("control grid of regime " + std::to_string(i + 1) + " is empty");
        }
        if (coefficients.entries[i].size() != control_grid[i].size()) {
            throw ModelError("control grid and coefficient samples disagree for regime " +
                             std::to_string(i + 1));
        }
    }
    if (const auto* sw = std::get_if<SwitchingCosts>(&intervention)) {
        if (sw->cost.size() != regime_count) {
            throw ModelError("switching cost matrix must be regime_count x regime_count");
        }
    } else if (const auto* im = std::get_if<ImpulseSpec>(&intervention)) {
        if (im->regimes.size() != regime_count) {
            throw ModelError("impulse candidate lists must cover every regime");
        }
    }
}

ValidationReport validate_monotonicity(const SwitchingProblem& problem,
                                       std::span<const double> sample_points, double eps_pos) {
    problem.check_consistent();
    ValidationReport rep;
    double min_margin = std::numeric_limits<double>::infinity();
    double min_coupling = std::numeric_limits<double>::infinity();
    bool has_coupling = false;

    for (std::size_t i = 0; i < problem.regime_count; ++i) {
        const auto& samples = problem.coefficients.entries[i];
        for (std::size_t a = 0; a < samples.size(); ++a) {
            const auto& cf = samples[a];
            for (double x : sample_points) {
                const double c = eval_named(cf.discount, x, "discount", i, a);
                double coupling_sum = 0.0;
                for (std::size_t j = 0; j < cf.coupling.size(); ++j) {
                    if (j == i || !cf.coupling[j]) continue;
                    const double d = eval_named(cf.coupling[j], x, "coupling", i, a);
                    has_coupling = true;
                    min_coupling = std::min(min_coupling, d);
                    coupling_sum += d;
                }
                min_margin = std::min(min_margin, c - coupling_sum);
            }
        }
    }
    if (!has_coupling) min_coupling = 0.0;

    rep.certified_constant = min_margin;
    rep.min_coupling = min_coupling;
    rep.passed = min_margin > eps_pos && min_coupling >= -eps_pos;
    std::ostringstream os;
    os << "min(c - sum d) = " << min_margin << ", min d_ij = " << min_coupling;
    rep.detail = os.str();
    return rep;
}

ValidationReport validate_triangular_costs(const InterventionSpec& spec,
                                           std::span<const double> sample_points, double eps_pos) {
    const auto* sw = std::get_if<SwitchingCosts>(&spec);
    if (!sw) throw UsageError("validate_triangular_costs requires the switching variant");
    const std::size_t m = sw->regime_count();
    if (m < 2) throw UsageError("validate_triangular_costs requires at least two regimes");

    double min_triple = std::numeric_limits<double>::infinity();
    for (double x : sample_points) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (j == i) continue;
                for (std::size_t l = 0; l < m; ++l) {
                    if (l == j) continue;
                    const double v = sw->eval(i, j, x) + sw->eval(j, l, x) - sw->eval(i, l, x);
                    min_triple = std::min(min_triple, v);
                }
            }
        }
    }

    ValidationReport rep;
    rep.certified_constant = min_triple;
    rep.passed = min_triple > eps_pos;
    std::ostringstream os;
    os << "min over triples of k_ij + k_jl - k_il = " << min_triple;
    rep.detail = os.str();
    return rep;
}

StrictSubsolution strict_subsolution(const SwitchingProblem& problem, double eps,
                                     std::span<const double> sample_points) {
    const auto* sw = std::get_if<SwitchingCosts>(&problem.intervention);
    if (!sw) throw UsageError("strict_subsolution requires the switching variant");

    const auto tri = validate_triangular_costs(problem.intervention, sample_points);
    const double kappa0 = tri.certified_constant;
    if (!tri.passed) throw ParameterError("triangular cost condition fails; no kappa0 > 0");
    if (!(eps > 0.0) || !(eps < kappa0)) {
        throw ParameterError("eps must lie in (0, kappa0), kappa0 = " + std::to_string(kappa0));
    }
    const auto mono = validate_monotonicity(problem, sample_points);
    if (!mono.passed) throw ParameterError("monotonicity condition fails; no lambda0 > 0");
    const double lambda0 = mono.certified_constant;
    const std::size_t m = problem.regime_count;

    // k~_i = min{ min_{j != i} (k_ji - eps), 0 }
    const auto k_tilde = [&](std::size_t i, double x) {
        double v = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j != i) v = std::min(v, sw->eval(j, i, x) - eps);
        }
        return v;
    };

    // Estimate C' = sup over samples of the discrete operator applied to -k~.
    // The operator is evaluated on a grid covering the domain; the sample
    // points need not be grid nodes for the margin check below.
    const std::size_t op_nodes = 512;
    const Grid1D grid = Grid1D::uniform(problem.x_lo, problem.x_hi,
                                        (problem.x_hi - problem.x_lo) / double(op_nodes));
    SwitchingProblem op_problem = problem;
    op_problem.orientation = Orientation::Max;
    const DiscreteSystem sys = assemble(op_problem, grid);
    std::vector<double> neg_ktilde(sys.unknowns());
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t l = 0; l < grid.nodes(); ++l) {
            neg_ktilde[sys.row_index(i, l)] = -k_tilde(i, grid.node(l));
        }
    }
    double cprime = -std::numeric_limits<double>::infinity();
    for (std::size_t row = 0; row < sys.unknowns(); ++row) {
        for (const auto& cand : sys.pde_rows[row]) {
            double acc = 0.0;
            for (const auto& [col, v] : cand.entries) acc += v * neg_ktilde[col];
            cprime = std::max(cprime, acc - cand.rhs);
        }
    }

    const double margin_needed = std::min(eps, kappa0 - eps);
    const double c_const = std::max(0.0, (cprime + margin_needed) / lambda0);

    StrictSubsolution out;
    out.operator_bound = cprime;
    out.constant = c_const;
    out.required_margin = -margin_needed;
    out.values.assign(m, std::vector<double>(sample_points.size()));
    double margin = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < sample_points.size(); ++s) {
        const double x = sample_points[s];
        for (std::size_t i = 0; i < m; ++i) {
            out.values[i][s] = -k_tilde(i, x) - c_const;
        }
        // obstacle half: w_i - min_{j != i} (w_j + k_ij) <= -min(eps, kappa0 - eps)
        for (std::size_t i = 0; i < m; ++i) {
            double intervention = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < m; ++j) {
                if (j != i) {
                    intervention = std::min(intervention, out.values[j][s] + sw->eval(i, j, x));
                }
            }
            if (m > 1) margin = std::max(margin, out.values[i][s] - intervention);
        }
    }
    out.margin = margin;
    out.passed = margin <= out.required_margin + 1e-12;
    return out;
}

}  // namespace hjbqvi
