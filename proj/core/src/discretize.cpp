#include "hjbqvi/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace hjbqvi {

namespace {

double eval_field(const ScalarField& f, double x) { return f ? f(x) : 0.0; }

[[noreturn]] void assembly_fail(const char* what, std::size_t regime, std::size_t node,
                                std::size_t control, double x) {
    std::ostringstream os;
    os << what << " at regime " << regime + 1 << ", node " << node << " (x = " << x
       << "), control sample " << control;
    throw AssemblyError(os.str());
}

double cost_sign(Orientation o) { return o == Orientation::Max ? 1.0 : -1.0; }

}  // namespace

bool DiscreteSystem::singleton_controls() const {
    for (const auto& cands : pde_rows) {
        if (cands.size() != 1) return false;
    }
    return true;
}

std::size_t DiscreteSystem::max_control_samples() const {
    std::size_t m = 0;
    for (const auto& cands : pde_rows) m = std::max(m, cands.size());
    return m;
}

SparseMatrix DiscreteSystem::control_sample_matrix(std::size_t sample) const {
    std::vector<Triplet> trips;
    for (std::size_t row = 0; row < pde_rows.size(); ++row) {
        const auto& cands = pde_rows[row];
        const auto& cand = cands[std::min(sample, cands.size() - 1)];
        for (const auto& [col, v] : cand.entries) {
            trips.push_back({static_cast<std::uint32_t>(row), col, v});
        }
    }
    return SparseMatrix::from_triplets(unknowns(), unknowns(), std::move(trips));
}

std::vector<double> DiscreteSystem::control_sample_rhs(std::size_t sample) const {
    std::vector<double> rhs(pde_rows.size());
    for (std::size_t row = 0; row < pde_rows.size(); ++row) {
        const auto& cands = pde_rows[row];
        rhs[row] = cands[std::min(sample, cands.size() - 1)].rhs;
    }
    return rhs;
}

DiscreteSystem assemble(const SwitchingProblem& problem, const Grid1D& grid) {
    problem.check_consistent();

    DiscreteSystem sys;
    sys.orientation = problem.orientation;
    sys.regime_count = problem.regime_count;
    sys.grid = grid;
    sys.boundary_values = problem.boundary_values;

    const std::size_t nodes = grid.nodes();
    const std::size_t n = problem.regime_count * nodes;
    const double h = grid.h();
    sys.pde_rows.resize(n);

    double lambda0 = std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < problem.regime_count; ++i) {
        const auto& samples = problem.coefficients.entries[i];
        for (std::size_t l = 0; l < nodes; ++l) {
            const double x = grid.node(l);
            const std::size_t row = sys.row_index(i, l);
            auto& cands = sys.pde_rows[row];
            cands.reserve(samples.size());

            for (std::size_t a = 0; a < samples.size(); ++a) {
                const auto& cf = samples[a];
                const double sigma = eval_field(cf.sigma, x);
                const double drift = eval_field(cf.drift, x);
                const double discount = eval_field(cf.discount, x);
                const double reward = eval_field(cf.reward, x);

                const double theta = 0.5 * sigma * sigma / (h * h);
                const double bp = std::max(drift, 0.0) / h;   // forward-difference weight
                const double bm = std::max(-drift, 0.0) / h;  // backward-difference weight

                double sub = -(theta + bm);
                double diag = 2.0 * theta + bp + bm + discount;
                double super = -(theta + bp);
                double rhs = reward;

                if (!(diag > 0.0)) {
                    assembly_fail("nonpositive diagonal (discount too small)", i, l, a, x);
                }
                if (theta < 0.0) assembly_fail("negative diffusion weight", i, l, a, x);

                PdeRowCandidate cand;
                double row_sum = diag;

                if (l == 0) {
                    // stencil must not reach below x_lo: only the degenerate
                    // row c*u = reward closes the equation there
                    if (std::abs(sub) > 1e-12 * (std::abs(diag) + 1.0)) {
                        assembly_fail(
                            "stencil reaches below x_lo (coefficients must degenerate there)", i, l,
                            a, x);
                    }
                    sub = 0.0;
                } else {
                    if (sub > 0.0) assembly_fail("positive sub-diagonal after upwinding", i, l, a, x);
                    if (sub != 0.0) {
                        cand.entries.emplace_back(static_cast<std::uint32_t>(row - 1), sub);
                        row_sum += sub;
                    }
                }

                cand.entries.emplace_back(static_cast<std::uint32_t>(row), diag);

                if (l + 1 == nodes) {
                    // reach into the Dirichlet node folds into the right-hand side
                    rhs -= super * problem.boundary_values[i];
                } else {
                    if (super > 0.0) {
                        assembly_fail("positive super-diagonal after upwinding", i, l, a, x);
                    }
                    if (super != 0.0) {
                        cand.entries.emplace_back(static_cast<std::uint32_t>(row + 1), super);
                        row_sum += super;
                    }
                }

                for (std::size_t j = 0; j < cf.coupling.size(); ++j) {
                    if (j == i || !cf.coupling[j]) continue;
                    const double d = cf.coupling[j](x);
                    if (d < 0.0) assembly_fail("negative coupling rate", i, l, a, x);
                    if (d != 0.0) {
                        cand.entries.emplace_back(
                            static_cast<std::uint32_t>(sys.row_index(j, l)), -d);
                        row_sum -= d;
                    }
                }

                if (!(row_sum > 0.0)) {
                    assembly_fail("row sum not strictly positive (M-matrix margin lost)", i, l, a,
                                  x);
                }
                lambda0 = std::min(lambda0, row_sum);

                std::sort(cand.entries.begin(), cand.entries.end());
                cand.rhs = rhs;
                cands.push_back(std::move(cand));
            }
        }
    }
    sys.lambda0 = lambda0;

    if (const auto* sw = std::get_if<SwitchingCosts>(&problem.intervention)) {
        sys.intervention_kind = InterventionKind::Switching;
        sys.intervention = assemble_switching_penalty_rows(sys, *sw, problem.orientation);
    } else if (const auto* im = std::get_if<ImpulseSpec>(&problem.intervention)) {
        sys.intervention_kind = InterventionKind::Impulse;
        sys.intervention = assemble_impulse_rows(
            sys, problem,
            im->clamp_destinations ? OutOfDomainPolicy::Clamp : OutOfDomainPolicy::Reject);
    }
    return sys;
}

std::vector<std::vector<InterventionRow>> assemble_switching_penalty_rows(
    const DiscreteSystem& sys, const SwitchingCosts& costs, Orientation orientation) {
    const std::size_t m = sys.regime_count;
    const std::size_t nodes = sys.nodes_per_regime();
    const double sign = cost_sign(orientation);

    std::vector<std::vector<InterventionRow>> rows(sys.unknowns());
    if (m < 2) return rows;  // nothing to switch to: system is a linear equation

    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t l = 0; l < nodes; ++l) {
            const std::size_t row = sys.row_index(i, l);
            const double x = sys.grid.node(l);
            auto& cands = rows[row];
            cands.reserve(m - 1);
            for (std::size_t j = 0; j < m; ++j) {
                if (j == i) continue;
                InterventionRow r;
                r.targets.emplace_back(static_cast<std::uint32_t>(sys.row_index(j, l)), 1.0);
                r.cost = sign * costs.eval(i, j, x);
                r.label = static_cast<std::int32_t>(j);
                cands.push_back(std::move(r));
            }
        }
    }
    return rows;
}

std::vector<std::vector<InterventionRow>> assemble_impulse_rows(const DiscreteSystem& sys,
                                                                const SwitchingProblem& problem,
                                                                OutOfDomainPolicy oob) {
    const auto* im = std::get_if<ImpulseSpec>(&problem.intervention);
    if (!im) throw UsageError("assemble_impulse_rows requires the impulse variant");
    const double sign = cost_sign(problem.orientation);
    const Grid1D& grid = sys.grid;
    const std::size_t nodes = grid.nodes();

    std::vector<std::vector<InterventionRow>> rows(sys.unknowns());
    for (std::size_t i = 0; i < sys.regime_count; ++i) {
        const auto& candidates = im->regimes[i];
        for (std::size_t l = 0; l < nodes; ++l) {
            const std::size_t row = sys.row_index(i, l);
            const double x = grid.node(l);
            auto& out = rows[row];
            out.reserve(candidates.size());
            for (std::size_t z = 0; z < candidates.size(); ++z) {
                double dest = candidates[z].destination ? candidates[z].destination(x) : x;
                const double cost = candidates[z].cost ? candidates[z].cost(x) : 0.0;
                if (dest < grid.x_lo() || dest > grid.x_hi()) {
                    if (oob == OutOfDomainPolicy::Reject) {
                        std::ostringstream os;
                        os << "impulse destination " << dest << " outside [" << grid.x_lo() << ", "
                           << grid.x_hi() << "] at regime " << i + 1 << ", node " << l
                           << ", candidate " << z;
                        throw AssemblyError(os.str());
                    }
                    dest = std::clamp(dest, grid.x_lo(), grid.x_hi());
                }

                InterventionRow r;
                r.label = static_cast<std::int32_t>(z);
                r.cost = sign * cost;

                // linear interpolation between the bracketing nodes; weights
                // on the Dirichlet node fold its datum into the cost entry
                const double s = (dest - grid.x_lo()) / grid.h();
                std::size_t m0 = static_cast<std::size_t>(std::floor(s));
                if (m0 > nodes) m0 = nodes;  // dest == x_hi
                double w1 = s - static_cast<double>(m0);
                if (w1 < 1e-14) w1 = 0.0;
                if (w1 > 1.0 - 1e-14 && w1 <= 1.0) {
                    m0 += 1;
                    w1 = 0.0;
                }
                const double w0 = 1.0 - w1;

                const auto put = [&](std::size_t node_idx, double w) {
                    if (w == 0.0) return;
                    if (node_idx >= nodes) {
                        r.cost += w * problem.boundary_values[i];  // Dirichlet fold
                    } else {
                        r.targets.emplace_back(
                            static_cast<std::uint32_t>(sys.row_index(i, node_idx)), w);
                    }
                };
                put(m0, w0);
                put(m0 + 1, w1);
                out.push_back(std::move(r));
            }
        }
    }
    return rows;
}

StackedIntervention stack_intervention_rows(const DiscreteSystem& sys) {
    StackedIntervention out;
    std::vector<Triplet> trips;
    std::uint32_t stacked = 0;
    for (std::size_t row = 0; row < sys.intervention.size(); ++row) {
        for (const auto& cand : sys.intervention[row]) {
            trips.push_back({stacked, static_cast<std::uint32_t>(row), 1.0});
            for (const auto& [col, w] : cand.targets) {
                trips.push_back({stacked, col, -w});
            }
            out.cost.push_back(cand.cost);
            out.owner.push_back(static_cast<std::uint32_t>(row));
            ++stacked;
        }
    }
    out.matrix = SparseMatrix::from_triplets(stacked, sys.unknowns(), std::move(trips));
    return out;
}

void export_system(const DiscreteSystem& sys, std::ostream& os) {
    char buf[96];
    os << "hjbqvi-system 1\n";
    os << "orientation " << (sys.orientation == Orientation::Max ? "max" : "min") << "\n";
    os << "regimes " << sys.regime_count << " nodes " << sys.nodes_per_regime() << "\n";
    std::snprintf(buf, sizeof buf, "grid %.17g %.17g %.17g\n", sys.grid.x_lo(), sys.grid.x_hi(),
                  sys.grid.h());
    os << buf;

    const std::size_t samples = sys.max_control_samples();
    for (std::size_t s = 0; s < samples; ++s) {
        const SparseMatrix a = sys.control_sample_matrix(s);
        os << "matrix A sample " << s << " " << a.rows() << " " << a.cols() << " " << a.nnz()
           << "\n";
        a.write_triplets(os);
        const auto rhs = sys.control_sample_rhs(s);
        os << "vector f sample " << s << " " << rhs.size() << "\n";
        for (double v : rhs) {
            std::snprintf(buf, sizeof buf, "%.17g\n", v);
            os << buf;
        }
    }

    const StackedIntervention stacked = stack_intervention_rows(sys);
    os << "matrix M " << stacked.matrix.rows() << " " << stacked.matrix.cols() << " "
       << stacked.matrix.nnz() << "\n";
    stacked.matrix.write_triplets(os);
    os << "vector g " << stacked.cost.size() << "\n";
    for (std::size_t k = 0; k < stacked.cost.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g\n", stacked.cost[k]);
        os << buf;
    }
    os << "vector owner " << stacked.owner.size() << "\n";
    for (auto o : stacked.owner) os << o << "\n";
}

}  // namespace hjbqvi
