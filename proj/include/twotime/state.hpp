#ifndef TWOTIME_STATE_HPP
#define TWOTIME_STATE_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "twotime/model.hpp"

namespace twotime {

using cdouble = std::complex<double>;

/// Where along x_rel = x1 - x2 a branch contributes.
enum class Support {
    Everywhere,
    Below,        ///< x_rel < -D
    Inside,       ///< -D <= x_rel <= D
    Above,        ///< x_rel > D
    WellInterior, ///< -D < x_rel < D
};

inline constexpr std::size_t support_count = 5;

/// Bit mask of the supports that are active at x_rel for half-width D.
unsigned active_supports(double x_rel, double D);

/// One exponential term of a two-time wavefunction,
///     amplitude * exp(i (p1 x1 + p2 x2 - e1 t1 - e2 t2)),
/// with p1, p2 the phase gradients and e1, e2 the energies attached to t1, t2.
/// Any of them may be complex (evanescent branches).
struct Branch {
    cdouble amplitude{1.0, 0.0};
    cdouble p1{};
    cdouble p2{};
    cdouble e1{};
    cdouble e2{};
    Support support = Support::Everywhere;

    bool propagating() const;
};

/// A finite sum of branches sharing one SystemParams. Eigenstates, wavegroups
/// and plane waves are all represented this way; every evaluation path
/// (single point, grid, slice) sums the same terms in the same order.
class TwoTimeState {
public:
    explicit TwoTimeState(const SystemParams& params);

    const SystemParams& params() const { return params_; }

    void add(const Branch& b);
    /// Appends every branch of `other` with its amplitude multiplied by `scale`.
    void append(const TwoTimeState& other, cdouble scale = 1.0);

    std::span<const Branch> group(Support s) const { return groups_[static_cast<std::size_t>(s)]; }
    std::size_t size() const;
    bool empty() const { return size() == 0; }

    /// Largest |Re p1|, |Re p2| over all branches.
    double max_wavevector() const;
    /// Largest |Re p1|/m, |Re p2|/M over all branches.
    double max_speed() const;
    /// Sum of |amplitude| over all branches.
    double amplitude_norm() const;

private:
    SystemParams params_;
    std::array<std::vector<Branch>, support_count> groups_;
};

/// One side of a separable evaluation: (x1, t1) for rows or (x2, t2) for columns.
struct SideCoord {
    double x = 0.0;
    double t = 0.0;
};

/// Value and first derivatives.
struct Jet {
    cdouble psi{};
    cdouble d_x1{};
    cdouble d_x2{};
    cdouble d_t1{};
    cdouble d_t2{};
};

/// Psi at every (rows[i], cols[j]) pair, row-major. Work is split across
/// `threads` workers (0 = hardware concurrency) over independent points only,
/// so results do not depend on the thread count.
std::vector<cdouble> evaluate_outer(const TwoTimeState& state, std::span<const SideCoord> rows,
                                    std::span<const SideCoord> cols, unsigned threads = 1);
std::vector<Jet> evaluate_outer_jet(const TwoTimeState& state, std::span<const SideCoord> rows,
                                    std::span<const SideCoord> cols, unsigned threads = 1);

cdouble evaluate(const TwoTimeState& state, const LabPoint& p);
Jet evaluate_jet(const TwoTimeState& state, const LabPoint& p);

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn);

unsigned resolve_threads(unsigned threads);

} // namespace twotime

#include "twotime/detail/parallel.hpp"

#endif
