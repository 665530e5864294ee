#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "walkport/state.hpp"

namespace walkport {

/// Reduced density matrix over a kept subsystem, row-major, indexed by the
/// subsystem's canonical basis labels.
class DensityMatrix {
  public:
    DensityMatrix(SlotSpace space, std::vector<cplx> entries) : space_(std::move(space)), mat_(std::move(entries)) {
        require(mat_.size() == space_.total_dim() * space_.total_dim(), "DensityMatrix: entry count mismatch");
    }

    static DensityMatrix zero(const SlotSpace& space) {
        return DensityMatrix(space, std::vector<cplx>(space.total_dim() * space.total_dim(), cplx{0.0, 0.0}));
    }

    static DensityMatrix from_pure(const StateVector& psi) {
        DensityMatrix rho = zero(psi.space());
        for (const auto& [i, ai] : psi.amplitudes())
            for (const auto& [j, aj] : psi.amplitudes()) rho.at(i, j) += ai * std::conj(aj);
        return rho;
    }

    const SlotSpace& space() const { return space_; }
    std::uint64_t dim() const { return space_.total_dim(); }

    cplx& at(std::uint64_t r, std::uint64_t c) { return mat_[r * dim() + c]; }
    cplx at(std::uint64_t r, std::uint64_t c) const { return mat_[r * dim() + c]; }
    const std::vector<cplx>& entries() const { return mat_; }

    double trace_real() const {
        double t = 0.0;
        for (std::uint64_t i = 0; i < dim(); ++i) t += at(i, i).real();
        return t;
    }

    DensityMatrix normalized() const {
        const double t = trace_real();
        require(t > prune_eps, "DensityMatrix::normalized: zero trace");
        DensityMatrix out = *this;
        for (auto& e : out.mat_) e /= t;
        return out;
    }

    DensityMatrix scaled(double f) const {
        DensityMatrix out = *this;
        for (auto& e : out.mat_) e *= f;
        return out;
    }

    void accumulate(const DensityMatrix& other, double weight) {
        require(space_ == other.space_, "DensityMatrix::accumulate: shape mismatch");
        for (std::size_t k = 0; k < mat_.size(); ++k) mat_[k] += weight * other.mat_[k];
    }

    double hermiticity_defect() const {
        double worst = 0.0;
        for (std::uint64_t r = 0; r < dim(); ++r)
            for (std::uint64_t c = r; c < dim(); ++c) worst = std::max(worst, std::abs(at(r, c) - std::conj(at(c, r))));
        return worst;
    }

    std::vector<double> eigenvalues() const {
        const auto d = static_cast<Eigen::Index>(dim());
        Eigen::MatrixXcd em(d, d);
        for (Eigen::Index r = 0; r < d; ++r)
            for (Eigen::Index c = 0; c < d; ++c)
                em(r, c) = at(static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(c));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(em);
        require(solver.info() == Eigen::Success, "DensityMatrix::eigenvalues: solver failed");
        std::vector<double> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + d);
        return ev;
    }

    double min_eigenvalue() const {
        const auto ev = eigenvalues();
        double mn = ev.empty() ? 0.0 : ev.front();
        for (double v : ev) mn = std::min(mn, v);
        return mn;
    }

    double max_abs_diff(const DensityMatrix& other) const {
        require(space_ == other.space_, "DensityMatrix::max_abs_diff: shape mismatch");
        double worst = 0.0;
        for (std::size_t k = 0; k < mat_.size(); ++k) worst = std::max(worst, std::abs(mat_[k] - other.mat_[k]));
        return worst;
    }

  private:
    SlotSpace space_;
    std::vector<cplx> mat_;
};

/// Reduced density matrix of a pure state over the kept slots. `keep` must
/// be a nonempty strict subset of the state's slots. The kept subsystem is
/// re-indexed in canonical order; everything else is traced out by grouping
/// support terms on the environment configuration.
inline DensityMatrix partial_trace(const StateVector& psi, const std::vector<Slot>& keep) {
    require(!keep.empty(), "partial_trace: keep set must be nonempty");
    const SlotSpace kept = psi.space().subset(keep);
    require(kept.count() < psi.space().count(), "partial_trace: keep set must be a strict subset");

    std::vector<int> kept_pos;    // positions of kept slots within the full space
    std::vector<int> env_pos;
    for (int i = 0; i < psi.space().count(); ++i) {
        if (kept.contains(psi.space().slots()[static_cast<std::size_t>(i)]))
            kept_pos.push_back(i);
        else
            env_pos.push_back(i);
    }

    // env key -> list of (kept index, amplitude)
    std::map<std::uint64_t, std::vector<std::pair<std::uint64_t, cplx>>> groups;
    std::vector<int> kd(kept_pos.size());
    for (const auto& [idx, a] : psi.amplitudes()) {
        std::uint64_t env_key = 0;
        for (int p : env_pos) env_key = env_key * static_cast<std::uint64_t>(psi.space().dim(p)) + static_cast<std::uint64_t>(psi.space().digit_at(idx, p));
        for (std::size_t k = 0; k < kept_pos.size(); ++k) kd[k] = psi.space().digit_at(idx, kept_pos[k]);
        groups[env_key].emplace_back(kept.pack(kd), a);
    }

    DensityMatrix rho = DensityMatrix::zero(kept);
    for (const auto& [env_key, terms] : groups) {
        (void)env_key;
        for (const auto& [i, ai] : terms)
            for (const auto& [j, aj] : terms) rho.at(i, j) += ai * std::conj(aj);
    }
    return rho;
}

}  // namespace walkport
