#include "hjbqvi/solvers.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hjbqvi/linear_solver.hpp"

namespace hjbqvi {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::MaxIterations: return "MaxIterations";
        case SolveStatus::SingularPolicy: return "SingularPolicy";
    }
    return "?";
}

namespace {

constexpr double kTieTol = 1e-14;          // argmax tie: retain the incumbent choice
constexpr std::size_t kBandLimit = 64;     // interleaved bandwidth beyond which the
                                           // general sparse path takes over

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/**
 * Policy iteration on the canonical max-form system
 *     sup_w [ A~(w) u - b~(w) ] = 0.
 * Min-orientation problems are mapped here by negating the right-hand sides
 * and cost entries (u -> -u); policies are invariant under that mapping.
 */
class PolicyIterationEngine {
  public:
    enum class Scheme { Penalized, Direct, PerStrategy };

    PolicyIterationEngine(const DiscreteSystem& sys, Scheme scheme, double rho)
        : sys_(sys),
          scheme_(scheme),
          rho_(rho),
          sign_(sys.orientation == Orientation::Max ? 1.0 : -1.0),
          n_(sys.unknowns()),
          regimes_(sys.regime_count),
          nodes_(sys.nodes_per_regime()) {
        if (scheme == Scheme::PerStrategy) {
            std::size_t max_cands = 0;
            for (const auto& c : sys.intervention) max_cands = std::max(max_cands, c.size());
            active_.assign(n_ * std::max<std::size_t>(max_cands, 1), 0);
            active_stride_ = std::max<std::size_t>(max_cands, 1);
        }
        policy_.rows.assign(n_, {});
        u_.assign(n_, 0.0);
    }

    SolveReport run(const InitialGuess& init, const StoppingCriterion& crit) {
        const auto t0 = std::chrono::steady_clock::now();
        SolveReport rep;
        rep.penalty_parameter = scheme_ == Scheme::Direct ? 0.0 : rho_;

        std::size_t iteration = 0;
        bool have_solved_iterate = false;

        if (const auto* iv = std::get_if<InitialVector>(&init)) {
            if (iv->values.size() != n_) throw ParameterError("initial vector size mismatch");
            for (std::size_t r = 0; r < n_; ++r) {
                u_[r] = sign_ * iv->values[r];
                if (!std::isfinite(u_[r])) throw ParameterError("initial vector must be finite");
            }
        } else {
            // initial policy: iteration 0 solves its linear system outright
            const auto& ip = std::get<InitialPolicy>(init);
            if (ip.policy.rows.size() != n_) throw ParameterError("initial policy size mismatch");
            policy_ = ip.policy;
            if (scheme_ == Scheme::PerStrategy) {
                for (std::size_t r = 0; r < n_; ++r) set_active_from_entry(r, policy_.rows[r]);
            }
            std::vector<double> solved;
            if (!assemble_and_solve(solved)) {
                return finish_singular(rep, 0, t0);
            }
            u_ = std::move(solved);
            have_solved_iterate = true;
        }

        std::vector<double> next;
        while (iteration < crit.max_iterations) {
            ++iteration;
            improve_policy();
            if (!assemble_and_solve(next)) {
                return finish_singular(rep, iteration, t0);
            }
            if (have_solved_iterate) {
                // Howard iterates decrease monotonically in canonical form
                double viol = 0.0;
                for (std::size_t r = 0; r < n_; ++r) viol = std::max(viol, next[r] - u_[r]);
                rep.max_monotonicity_violation =
                    std::max(rep.max_monotonicity_violation, viol);
            }
            double diff = 0.0;
            for (std::size_t r = 0; r < n_; ++r) diff = std::max(diff, std::abs(next[r] - u_[r]));
            u_.swap(next);
            have_solved_iterate = true;
            const double criterion = diff / std::max(sup_norm(u_), crit.scale);
            rep.residual_history.push_back(criterion);
            if (criterion < crit.tol) {
                rep.status = SolveStatus::Converged;
                break;
            }
        }
        rep.iterations = iteration;
        if (rep.status != SolveStatus::Converged) rep.status = SolveStatus::MaxIterations;

        rep.solution.resize(n_);
        for (std::size_t r = 0; r < n_; ++r) rep.solution[r] = sign_ * u_[r];
        rep.final_policy = policy_;
        rep.complementarity_residual = complementarity();
        rep.wall_time_seconds = elapsed(t0);
        return rep;
    }

  private:
    using clock = std::chrono::steady_clock;

    static double elapsed(clock::time_point t0) {
        return std::chrono::duration<double>(clock::now() - t0).count();
    }

    SolveReport finish_singular(SolveReport& rep, std::size_t iteration, clock::time_point t0) {
        if (scheme_ != Scheme::Direct) {
            // penalized policy matrices are strictly diagonally dominant by
            // construction; singularity would be an assembly bug
            throw std::logic_error("penalized policy matrix reported singular");
        }
        rep.status = SolveStatus::SingularPolicy;
        rep.singular_iteration = iteration;
        rep.iterations = iteration;
        rep.final_policy = policy_;
        rep.wall_time_seconds = elapsed(t0);
        return rep;
    }

    // canonical PDE residual of one candidate: sum(entries * u) - sign*rhs
    double pde_candidate_residual(const PdeRowCandidate& cand) const {
        double acc = -sign_ * cand.rhs;
        for (const auto& [col, v] : cand.entries) acc += v * u_[col];
        return acc;
    }

    // canonical intervention residual: u_row - sum(w * u) - sign*cost
    double intervention_candidate_residual(std::size_t row, const InterventionRow& cand) const {
        double acc = u_[row] - sign_ * cand.cost;
        for (const auto& [col, w] : cand.targets) acc -= w * u_[col];
        return acc;
    }

    void set_active_from_entry(std::size_t row, const Policy::Entry& e) {
        auto* flags = &active_[row * active_stride_];
        std::fill(flags, flags + active_stride_, std::uint8_t{0});
        if (e.intervene && e.target >= 0 &&
            static_cast<std::size_t>(e.target) < sys_.intervention[row].size()) {
            // map a plain policy onto the per-strategy active set
            for (std::size_t z = 0; z < sys_.intervention[row].size(); ++z) {
                if (sys_.intervention[row][z].label == e.target) flags[z] = 1;
            }
        }
    }

    void improve_policy() {
        for (std::size_t row = 0; row < n_; ++row) {
            auto& entry = policy_.rows[row];

            // continuous control: componentwise argmax with incumbent ties
            const auto& cands = sys_.pde_rows[row];
            std::size_t best_a = 0;
            double best_pde = pde_candidate_residual(cands[0]);
            for (std::size_t a = 1; a < cands.size(); ++a) {
                const double r = pde_candidate_residual(cands[a]);
                if (r > best_pde) {
                    best_pde = r;
                    best_a = a;
                }
            }
            if (entry.control < cands.size() && best_a != entry.control) {
                const double incumbent = pde_candidate_residual(cands[entry.control]);
                if (incumbent >= best_pde - kTieTol) best_a = entry.control;
            }
            entry.control = static_cast<std::uint16_t>(best_a);

            const auto& icands = sys_.intervention[row];
            if (icands.empty()) {
                entry.intervene = 0;
                entry.target = -1;
                if (scheme_ == Scheme::PerStrategy) {
                    std::fill_n(&active_[row * active_stride_], active_stride_, std::uint8_t{0});
                }
                continue;
            }

            if (scheme_ == Scheme::PerStrategy) {
                // activate every strictly violated target; ties keep membership
                auto* flags = &active_[row * active_stride_];
                double best_int = -std::numeric_limits<double>::infinity();
                std::int32_t best_label = -1;
                bool any = false;
                for (std::size_t z = 0; z < icands.size(); ++z) {
                    const double r = intervention_candidate_residual(row, icands[z]);
                    if (std::abs(r) > kTieTol) flags[z] = r > 0.0 ? 1 : 0;
                    if (flags[z]) any = true;
                    if (r > best_int) {
                        best_int = r;
                        best_label = icands[z].label;
                    }
                }
                entry.intervene = any ? 1 : 0;
                entry.target = any ? best_label : -1;
                continue;
            }

            std::size_t best_z = 0;
            double best_int = intervention_candidate_residual(row, icands[0]);
            for (std::size_t z = 1; z < icands.size(); ++z) {
                const double r = intervention_candidate_residual(row, icands[z]);
                if (r > best_int) {
                    best_int = r;
                    best_z = z;
                }
            }
            // incumbent tie on the argmax over targets
            if (entry.intervene && entry.target >= 0) {
                for (std::size_t z = 0; z < icands.size(); ++z) {
                    if (icands[z].label == entry.target && z != best_z) {
                        const double incumbent = intervention_candidate_residual(row, icands[z]);
                        if (incumbent >= best_int - kTieTol) {
                            best_z = z;
                            best_int = incumbent;
                        }
                        break;
                    }
                }
            }

            if (scheme_ == Scheme::Penalized) {
                // beta = 1 iff the obstacle is strictly violated; tie keeps beta
                std::uint8_t beta = entry.intervene;
                if (best_int > kTieTol) {
                    beta = 1;
                } else if (best_int < -kTieTol) {
                    beta = 0;
                }
                entry.intervene = beta;
                if (beta) entry.target = icands[best_z].label;
            } else {  // Direct: componentwise argmax between PDE and intervention rows
                std::uint8_t pick_int = entry.intervene;
                if (best_int > best_pde + kTieTol) {
                    pick_int = 1;
                } else if (best_int < best_pde - kTieTol) {
                    pick_int = 0;
                }
                entry.intervene = pick_int;
                entry.target = pick_int ? icands[best_z].label : -1;
            }
        }
    }

    const InterventionRow* selected_intervention(std::size_t row) const {
        const auto& entry = policy_.rows[row];
        if (!entry.intervene || entry.target < 0) return nullptr;
        for (const auto& cand : sys_.intervention[row]) {
            if (cand.label == entry.target) return &cand;
        }
        return nullptr;
    }

    // node-major interleaved index: unknown (i, l) -> l*regimes + i
    std::size_t interleaved(std::size_t row) const {
        return (row % nodes_) * regimes_ + row / nodes_;
    }

    bool assemble_and_solve(std::vector<double>& out) {
        // first pass: bandwidth and scale in interleaved ordering
        std::size_t kl = 0, ku = 0;
        double scale = 0.0;
        const auto extend = [&](std::size_t q_row, std::size_t q_col) {
            if (q_col < q_row) kl = std::max(kl, q_row - q_col);
            if (q_col > q_row) ku = std::max(ku, q_col - q_row);
        };
        for (std::size_t row = 0; row < n_; ++row) {
            const std::size_t q = interleaved(row);
            double abs_sum = 0.0;
            const auto& entry = policy_.rows[row];
            if (scheme_ == Scheme::Direct && entry.intervene) {
                const InterventionRow* iv = selected_intervention(row);
                extend(q, q);
                abs_sum += 1.0;
                if (iv) {
                    for (const auto& [col, w] : iv->targets) {
                        extend(q, interleaved(col));
                        abs_sum += std::abs(w);
                    }
                }
            } else {
                const auto& cand = sys_.pde_rows[row][entry.control];
                for (const auto& [col, v] : cand.entries) {
                    extend(q, interleaved(col));
                    abs_sum += std::abs(v);
                }
                if (scheme_ == Scheme::Penalized && entry.intervene) {
                    const InterventionRow* iv = selected_intervention(row);
                    extend(q, q);
                    abs_sum += rho_;
                    if (iv) {
                        for (const auto& [col, w] : iv->targets) {
                            extend(q, interleaved(col));
                            abs_sum += rho_ * std::abs(w);
                        }
                    }
                } else if (scheme_ == Scheme::PerStrategy) {
                    const auto* flags = &active_[row * active_stride_];
                    for (std::size_t z = 0; z < sys_.intervention[row].size(); ++z) {
                        if (!flags[z]) continue;
                        extend(q, q);
                        abs_sum += rho_;
                        for (const auto& [col, w] : sys_.intervention[row][z].targets) {
                            extend(q, interleaved(col));
                            abs_sum += rho_ * std::abs(w);
                        }
                    }
                }
            }
            scale = std::max(scale, abs_sum);
        }

        if (kl + ku > kBandLimit) return solve_general(out, scale);

        lu_.reset(n_, kl, ku);
        rhs_.assign(n_, 0.0);
        for (std::size_t row = 0; row < n_; ++row) {
            const std::size_t q = interleaved(row);
            const auto& entry = policy_.rows[row];
            if (scheme_ == Scheme::Direct && entry.intervene) {
                const InterventionRow* iv = selected_intervention(row);
                lu_.add(q, q, 1.0);
                if (iv) {
                    for (const auto& [col, w] : iv->targets) lu_.add(q, interleaved(col), -w);
                    rhs_[q] = sign_ * iv->cost;
                }
                continue;
            }
            const auto& cand = sys_.pde_rows[row][entry.control];
            for (const auto& [col, v] : cand.entries) lu_.add(q, interleaved(col), v);
            rhs_[q] = sign_ * cand.rhs;
            if (scheme_ == Scheme::Penalized && entry.intervene) {
                const InterventionRow* iv = selected_intervention(row);
                if (iv) {
                    lu_.add(q, q, rho_);
                    for (const auto& [col, w] : iv->targets) {
                        lu_.add(q, interleaved(col), -rho_ * w);
                    }
                    rhs_[q] += rho_ * sign_ * iv->cost;
                }
            } else if (scheme_ == Scheme::PerStrategy) {
                const auto* flags = &active_[row * active_stride_];
                for (std::size_t z = 0; z < sys_.intervention[row].size(); ++z) {
                    if (!flags[z]) continue;
                    const auto& iv = sys_.intervention[row][z];
                    lu_.add(q, q, rho_);
                    for (const auto& [col, w] : iv.targets) {
                        lu_.add(q, interleaved(col), -rho_ * w);
                    }
                    rhs_[q] += rho_ * sign_ * iv.cost;
                }
            }
        }

        if (!lu_.factor(1e-14, scale)) return false;
        lu_.solve(rhs_);
        out.resize(n_);
        for (std::size_t row = 0; row < n_; ++row) {
            const double v = rhs_[interleaved(row)];
            if (!std::isfinite(v)) return false;
            out[row] = v;
        }
        return true;
    }

    // fallback for wide (long-range impulse) policy matrices
    bool solve_general(std::vector<double>& out, double /*scale*/) {
        std::vector<Triplet> trips;
        std::vector<double> rhs(n_, 0.0);
        for (std::size_t row = 0; row < n_; ++row) {
            const std::uint32_t r32 = static_cast<std::uint32_t>(row);
            const auto& entry = policy_.rows[row];
            if (scheme_ == Scheme::Direct && entry.intervene) {
                const InterventionRow* iv = selected_intervention(row);
                trips.push_back({r32, r32, 1.0});
                if (iv) {
                    for (const auto& [col, w] : iv->targets) trips.push_back({r32, col, -w});
                    rhs[row] = sign_ * iv->cost;
                }
                continue;
            }
            const auto& cand = sys_.pde_rows[row][entry.control];
            for (const auto& [col, v] : cand.entries) trips.push_back({r32, col, v});
            rhs[row] = sign_ * cand.rhs;
            if (scheme_ == Scheme::Penalized && entry.intervene) {
                const InterventionRow* iv = selected_intervention(row);
                if (iv) {
                    trips.push_back({r32, r32, rho_});
                    for (const auto& [col, w] : iv->targets) {
                        trips.push_back({r32, col, -rho_ * w});
                    }
                    rhs[row] += rho_ * sign_ * iv->cost;
                }
            } else if (scheme_ == Scheme::PerStrategy) {
                const auto* flags = &active_[row * active_stride_];
                for (std::size_t z = 0; z < sys_.intervention[row].size(); ++z) {
                    if (!flags[z]) continue;
                    const auto& iv = sys_.intervention[row][z];
                    trips.push_back({r32, r32, rho_});
                    for (const auto& [col, w] : iv.targets) trips.push_back({r32, col, -rho_ * w});
                    rhs[row] += rho_ * sign_ * iv.cost;
                }
            }
        }
        const SparseMatrix a = SparseMatrix::from_triplets(n_, n_, std::move(trips));
        LinearSolveOutcome outcome = hjbqvi::solve(a, rhs);
        if (!outcome.ok()) return false;
        out = std::move(outcome.solution);
        return true;
    }

    double complementarity() const {
        // active-set consistency of the converged policy
        const double tol_active = 1e-8 * (1.0 + sup_norm(u_));
        double worst = 0.0;
        for (std::size_t row = 0; row < n_; ++row) {
            const auto& icands = sys_.intervention[row];
            const auto& entry = policy_.rows[row];
            if (scheme_ == Scheme::Direct) {
                double r_pde = pde_candidate_residual(sys_.pde_rows[row][entry.control]);
                double best = r_pde;
                for (const auto& cand : icands) {
                    best = std::max(best, intervention_candidate_residual(row, cand));
                }
                worst = std::max(worst, std::abs(best));
                continue;
            }
            if (icands.empty()) continue;
            if (scheme_ == Scheme::PerStrategy) {
                const auto* flags = &active_[row * active_stride_];
                for (std::size_t z = 0; z < icands.size(); ++z) {
                    const double r = intervention_candidate_residual(row, icands[z]);
                    if (flags[z]) {
                        worst = std::max(worst, std::max(0.0, -r - tol_active));
                    } else {
                        worst = std::max(worst, std::max(0.0, r - tol_active));
                    }
                }
                continue;
            }
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& cand : icands) {
                best = std::max(best, intervention_candidate_residual(row, cand));
            }
            if (entry.intervene) {
                worst = std::max(worst, std::max(0.0, -best - tol_active));
            } else {
                worst = std::max(worst, std::max(0.0, best - tol_active));
            }
        }
        return worst;
    }

    const DiscreteSystem& sys_;
    Scheme scheme_;
    double rho_;
    double sign_;
    std::size_t n_, regimes_, nodes_;

    Policy policy_;
    std::vector<double> u_;  // canonical iterate
    std::vector<std::uint8_t> active_;  // per-strategy active sets, row-major
    std::size_t active_stride_ = 1;
    std::size_t target_index_cache_ = 0;

    BandedLU lu_;
    std::vector<double> rhs_;
};

}  // namespace

std::vector<double> initial_guess_continuation_value(const DiscreteSystem& sys) {
    // A u0 = reward with the first control sample; intervention ignored
    PolicyIterationEngine engine(sys, PolicyIterationEngine::Scheme::Penalized, 0.0);
    Policy p;
    p.rows.assign(sys.unknowns(), Policy::Entry{0, 0, -1});
    StoppingCriterion crit;
    crit.max_iterations = 0;  // the initial policy's solve is the answer
    SolveReport rep = engine.run(InitialPolicy{std::move(p)}, crit);
    if (rep.solution.empty()) {
        throw std::logic_error("continuation-value system reported singular for an M-matrix");
    }
    return rep.solution;
}

Policy all_intervention_policy(const DiscreteSystem& sys) {
    Policy p;
    p.rows.assign(sys.unknowns(), Policy::Entry{0, 1, -1});
    for (std::size_t row = 0; row < sys.unknowns(); ++row) {
        if (!sys.intervention[row].empty()) {
            p.rows[row].target = sys.intervention[row].front().label;
        } else {
            p.rows[row].intervene = 0;
        }
    }
    return p;
}

SolveReport solve_penalized(const DiscreteSystem& sys, double rho, const InitialGuess& init,
                            const StoppingCriterion& crit) {
    if (rho < 0.0) throw ParameterError("penalty parameter must be >= 0");
    PolicyIterationEngine engine(sys, PolicyIterationEngine::Scheme::Penalized, rho);
    return engine.run(init, crit);
}

SolveReport solve_direct(const DiscreteSystem& sys, const InitialGuess& init,
                         const StoppingCriterion& crit) {
    PolicyIterationEngine engine(sys, PolicyIterationEngine::Scheme::Direct, 0.0);
    return engine.run(init, crit);
}

SolveReport solve_per_strategy_penalty(const DiscreteSystem& sys, double rho,
                                       const InitialGuess& init, const StoppingCriterion& crit) {
    if (rho < 0.0) throw ParameterError("penalty parameter must be >= 0");
    if (sys.intervention_kind == InterventionKind::Impulse) {
        throw UsageError("per-strategy penalty requires the switching variant");
    }
    PolicyIterationEngine engine(sys, PolicyIterationEngine::Scheme::PerStrategy, rho);
    return engine.run(init, crit);
}

SolveReport solve_continuation(const DiscreteSystem& sys, double rho_target,
                               const StoppingCriterion& crit) {
    if (!(rho_target > 0.0)) throw ParameterError("continuation requires rho_target > 0");
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> u0 = initial_guess_continuation_value(sys);

    if (rho_target <= 200.0) {
        SolveReport rep = solve_penalized(sys, rho_target, InitialVector{u0}, crit);
        rep.continuation_stages = {{rho_target, rep.iterations}};
        rep.wall_time_seconds = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - t0).count();
        return rep;
    }

    SolveReport first = solve_penalized(sys, 100.0, InitialVector{u0}, crit);
    SolveReport rep = solve_penalized(sys, rho_target, InitialVector{first.solution}, crit);
    rep.continuation_stages = {{100.0, first.iterations}, {rho_target, rep.iterations}};
    rep.iterations += first.iterations;
    rep.residual_history.insert(rep.residual_history.begin(), first.residual_history.begin(),
                                first.residual_history.end());
    rep.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

double intervention_value(const DiscreteSystem& sys, std::size_t row, std::span<const double> u) {
    const auto& cands = sys.intervention[row];
    const bool maximize = sys.orientation == Orientation::Min;
    double best = maximize ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity();
    for (const auto& cand : cands) {
        double v = cand.cost;
        for (const auto& [col, w] : cand.targets) v += w * u[col];
        best = maximize ? std::max(best, v) : std::min(best, v);
    }
    return best;
}

std::vector<double> qvi_residual(const DiscreteSystem& sys, std::span<const double> u) {
    const bool max_form = sys.orientation == Orientation::Max;
    std::vector<double> out(sys.unknowns());
    for (std::size_t row = 0; row < sys.unknowns(); ++row) {
        double pde = max_form ? -std::numeric_limits<double>::infinity()
                              : std::numeric_limits<double>::infinity();
        for (const auto& cand : sys.pde_rows[row]) {
            double r = -cand.rhs;
            for (const auto& [col, v] : cand.entries) r += v * u[col];
            pde = max_form ? std::max(pde, r) : std::min(pde, r);
        }
        double combined = pde;
        if (!sys.intervention[row].empty()) {
            const double obstacle = u[row] - intervention_value(sys, row, u);
            combined = max_form ? std::max(pde, obstacle) : std::min(pde, obstacle);
        }
        out[row] = combined;
    }
    return out;
}

IterationStages iterated_optimal_stopping(const DiscreteSystem& sys, std::size_t n_max,
                                          ObstacleInnerSolver inner, const StoppingCriterion& crit,
                                          double inner_rho) {
    if (n_max < 1) throw ParameterError("iterated optimal stopping requires n_max >= 1");
    IterationStages out;

    // stage 0: the intervention-free HJB solution
    const std::vector<double> u0 = initial_guess_continuation_value(sys);
    SolveReport stage0 = solve_penalized(sys, 0.0, InitialVector{u0}, crit);
    out.stages.push_back(std::move(stage0));

    DiscreteSystem frozen = sys;  // intervention rows replaced stage by stage
    for (std::size_t n = 1; n <= n_max; ++n) {
        const std::vector<double>& prev = out.stages.back().solution;
        for (std::size_t row = 0; row < sys.unknowns(); ++row) {
            if (sys.intervention[row].empty()) continue;
            InterventionRow obstacle;
            obstacle.cost = intervention_value(sys, row, prev);  // frozen at u^{n-1}
            obstacle.label = 0;
            frozen.intervention[row] = {std::move(obstacle)};
        }
        SolveReport stage =
            inner == ObstacleInnerSolver::Direct
                ? solve_direct(frozen, InitialVector{prev}, crit)
                : solve_penalized(frozen, inner_rho, InitialVector{prev}, crit);
        if (stage.status == SolveStatus::SingularPolicy) {
            throw std::logic_error("obstacle-problem policy iteration reported singular");
        }
        double dec = 0.0;
        for (std::size_t r = 0; r < stage.solution.size(); ++r) {
            dec = std::max(dec, std::abs(stage.solution[r] - prev[r]));
        }
        out.sup_decrements.push_back(dec);
        out.stages.push_back(std::move(stage));
        if (dec == 0.0) break;  // exact fixed point reached
    }
    return out;
}

}  // namespace hjbqvi
