#pragma once

// Dense complex linear algebra for small multi-qubit systems (<= ~10 qubits).
//
// Indexing convention used throughout: big-endian. For an n-qubit register,
// qubit 0 is the most significant bit of the basis index, so |q0 q1 ... q_{n-1}>
// maps to index sum_k q_k * 2^(n-1-k). A gate applied to targets (t0, t1, ...)
// reads its own matrix index the same way, t0 as the most significant bit.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nsbox/bloch.hpp"
#include "nsbox/errors.hpp"

namespace nsbox {

using Cplx = std::complex<double>;

// Default tolerances: algebraic identities should hold to near machine
// precision; derived physics quantities accumulate more roundoff.
inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kPhysicsTol = 1e-9;

// Largest dimension a single tensor factor may reach (2^10 = one 10-qubit axis).
inline constexpr std::size_t kDefaultMaxDim = 1024;

namespace detail {

inline bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline std::size_t log2_exact(std::size_t v) {
    std::size_t n = 0;
    while (v > 1) {
        v >>= 1;
        ++n;
    }
    return n;
}

inline void require_finite(const Cplx& z, const char* what) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw ArgumentError(std::string(what) + ": non-finite entry");
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Matrix

class Matrix {
  public:
    Matrix() : rows_(0), cols_(0) {}

    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, Cplx(0.0, 0.0)) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<Cplx> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            throw ArgumentError("Matrix: data size does not match shape");
        }
        for (const auto& z : data_) detail::require_finite(z, "Matrix");
    }

    static Matrix identity(std::size_t dim) {
        Matrix m(dim, dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = Cplx(1.0, 0.0);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<Cplx>& data() const { return data_; }

    Matrix adjoint() const {
        Matrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
        return out;
    }

    Cplx trace() const {
        Cplx t(0.0, 0.0);
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw ArgumentError("Matrix multiply: shape mismatch");
        Matrix out(a.rows_, b.cols_);
        for (std::size_t r = 0; r < a.rows_; ++r) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Cplx ark = a(r, k);
                if (ark == Cplx(0.0, 0.0)) continue;
                for (std::size_t c = 0; c < b.cols_; ++c) out(r, c) += ark * b(k, c);
            }
        }
        return out;
    }

    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) {
            throw ArgumentError("Matrix add: shape mismatch");
        }
        Matrix out = a;
        for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += b.data_[i];
        return out;
    }

    friend Matrix operator*(const Cplx& s, const Matrix& m) {
        Matrix out = m;
        for (auto& z : out.data_) z *= s;
        return out;
    }

    double max_abs_diff(const Matrix& other) const {
        if (rows_ != other.rows_ || cols_ != other.cols_) {
            throw ArgumentError("Matrix compare: shape mismatch");
        }
        double m = 0.0;
        for (std::size_t i = 0; i < data_.size(); ++i) {
            m = std::max(m, std::abs(data_[i] - other.data_[i]));
        }
        return m;
    }

    bool is_hermitian(double tol = kAlgebraTol) const {
        if (rows_ != cols_) return false;
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = r; c < cols_; ++c)
                if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) return false;
        return true;
    }

  private:
    std::size_t rows_, cols_;
    std::vector<Cplx> data_;
};

// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
// returned in ascending order. Intended for the small matrices this library
// deals in (dim <= 64); accuracy is ~1e-14 relative to the spectral radius.
inline std::vector<double> hermitian_eigenvalues(Matrix a) {
    const std::size_t d = a.rows();
    if (d != a.cols()) throw ArgumentError("hermitian_eigenvalues: matrix not square");
    if (!a.is_hermitian(1e-9)) throw ArgumentError("hermitian_eigenvalues: matrix not Hermitian");

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) off += std::norm(a(p, q));
        if (off < 1e-28 * static_cast<double>(d * d)) break;

        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double abs_apq = std::abs(a(p, q));
                if (abs_apq < 1e-300) continue;
                const Cplx phase = a(p, q) / abs_apq;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * abs_apq);
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (std::size_t i = 0; i < d; ++i) {
                    if (i == p || i == q) continue;
                    const Cplx aip = a(i, p);
                    const Cplx aiq = a(i, q);
                    a(i, p) = c * aip - s * std::conj(phase) * aiq;
                    a(i, q) = s * phase * aip + c * aiq;
                    a(p, i) = std::conj(a(i, p));
                    a(q, i) = std::conj(a(i, q));
                }
                const double app_new = c * c * app - 2.0 * c * s * abs_apq + s * s * aqq;
                const double aqq_new = s * s * app + 2.0 * c * s * abs_apq + c * c * aqq;
                a(p, p) = Cplx(app_new, 0.0);
                a(q, q) = Cplx(aqq_new, 0.0);
                a(p, q) = Cplx(0.0, 0.0);
                a(q, p) = Cplx(0.0, 0.0);
            }
        }
    }

    std::vector<double> eig(d);
    for (std::size_t i = 0; i < d; ++i) eig[i] = a(i, i).real();
    std::sort(eig.begin(), eig.end());
    return eig;
}

// ---------------------------------------------------------------------------
// StateVector

class StateVector {
  public:
    StateVector(std::size_t num_qubits, std::vector<Cplx> amplitudes)
        : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
        if (num_qubits_ < 1) throw ArgumentError("StateVector: need at least one qubit");
        if (amps_.size() != (std::size_t{1} << num_qubits_)) {
            throw ArgumentError("StateVector: amplitude count must be 2^num_qubits");
        }
        double norm2 = 0.0;
        for (const auto& z : amps_) {
            detail::require_finite(z, "StateVector");
            norm2 += std::norm(z);
        }
        if (std::abs(norm2 - 1.0) > 2.0 * kAlgebraTol) {
            throw ArgumentError("StateVector: not normalized");
        }
    }

    // |index> in the big-endian computational basis.
    static StateVector basis_state(std::size_t num_qubits, std::size_t index) {
        std::vector<Cplx> a(std::size_t{1} << num_qubits, Cplx(0.0, 0.0));
        if (index >= a.size()) throw ArgumentError("basis_state: index out of range");
        a[index] = Cplx(1.0, 0.0);
        return StateVector(num_qubits, std::move(a));
    }

    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    const Cplx& operator[](std::size_t i) const { return amps_[i]; }
    const std::vector<Cplx>& amplitudes() const { return amps_; }

    double norm() const {
        double n2 = 0.0;
        for (const auto& z : amps_) n2 += std::norm(z);
        return std::sqrt(n2);
    }

    Cplx inner_product(const StateVector& other) const {
        if (other.dim() != dim()) throw ArgumentError("inner_product: dimension mismatch");
        Cplx acc(0.0, 0.0);
        for (std::size_t i = 0; i < amps_.size(); ++i) acc += std::conj(amps_[i]) * other.amps_[i];
        return acc;
    }

    Matrix outer_product() const {  // |psi><psi|
        Matrix m(dim(), dim());
        for (std::size_t r = 0; r < dim(); ++r)
            for (std::size_t c = 0; c < dim(); ++c) m(r, c) = amps_[r] * std::conj(amps_[c]);
        return m;
    }

  private:
    std::size_t num_qubits_;
    std::vector<Cplx> amps_;

    friend StateVector apply_unitary(const StateVector&, const Matrix&, std::span<const std::size_t>);
    friend StateVector apply_mcx(const StateVector&, std::span<const std::size_t>, std::size_t);
};

// ---------------------------------------------------------------------------
// DensityMatrix

class DensityMatrix {
  public:
    DensityMatrix(std::size_t num_qubits, Matrix m) : num_qubits_(num_qubits), mat_(std::move(m)) {
        const std::size_t dim = std::size_t{1} << num_qubits_;
        if (num_qubits_ < 1 || mat_.rows() != dim || mat_.cols() != dim) {
            throw ArgumentError("DensityMatrix: shape must be 2^n x 2^n");
        }
        if (!mat_.is_hermitian(kAlgebraTol)) throw ArgumentError("DensityMatrix: not Hermitian");
        if (std::abs(mat_.trace() - Cplx(1.0, 0.0)) > kAlgebraTol) {
            throw ArgumentError("DensityMatrix: trace != 1");
        }
        // PSD check by full spectrum; dims here are tiny (<= 2^6 guarded).
        if (dim <= 64) {
            const auto eig = hermitian_eigenvalues(mat_);
            if (eig.front() < -1e-10) throw ArgumentError("DensityMatrix: negative eigenvalue");
        }
    }

    static DensityMatrix from_pure(const StateVector& psi) {
        return DensityMatrix(psi.num_qubits(), psi.outer_product());
    }

    static DensityMatrix maximally_mixed(std::size_t num_qubits) {
        const std::size_t dim = std::size_t{1} << num_qubits;
        Matrix m = Matrix::identity(dim);
        return DensityMatrix(num_qubits, Cplx(1.0 / static_cast<double>(dim), 0.0) * m);
    }

    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return mat_.rows(); }
    const Matrix& matrix() const { return mat_; }

    double purity() const {
        double p = 0.0;
        for (std::size_t r = 0; r < dim(); ++r)
            for (std::size_t c = 0; c < dim(); ++c) p += std::norm(mat_(r, c));
        return p;  // Tr(rho^2) since rho is Hermitian
    }

  private:
    std::size_t num_qubits_;
    Matrix mat_;
};

// ---------------------------------------------------------------------------
// Unitary

class Unitary {
  public:
    explicit Unitary(Matrix m) : mat_(std::move(m)) {
        if (mat_.rows() != mat_.cols() || !detail::is_power_of_two(mat_.rows())) {
            throw ArgumentError("Unitary: dimension must be a power of two");
        }
        const Matrix prod = mat_.adjoint() * mat_;
        if (prod.max_abs_diff(Matrix::identity(mat_.rows())) > kAlgebraTol) {
            throw ArgumentError("Unitary: U†U != I");
        }
    }

    std::size_t dim() const { return mat_.rows(); }
    std::size_t num_qubits() const { return detail::log2_exact(mat_.rows()); }
    const Matrix& matrix() const { return mat_; }
    const Cplx& operator()(std::size_t r, std::size_t c) const { return mat_(r, c); }

  private:
    Matrix mat_;
};

namespace gates {

inline Unitary identity(std::size_t num_qubits = 1) {
    return Unitary(Matrix::identity(std::size_t{1} << num_qubits));
}

inline Unitary hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    return Unitary(Matrix(2, 2, {Cplx(s, 0), Cplx(s, 0), Cplx(s, 0), Cplx(-s, 0)}));
}

inline Unitary pauli_x() {
    return Unitary(Matrix(2, 2, {Cplx(0, 0), Cplx(1, 0), Cplx(1, 0), Cplx(0, 0)}));
}

inline Unitary pauli_y() {
    return Unitary(Matrix(2, 2, {Cplx(0, 0), Cplx(0, -1), Cplx(0, 1), Cplx(0, 0)}));
}

inline Unitary pauli_z() {
    return Unitary(Matrix(2, 2, {Cplx(1, 0), Cplx(0, 0), Cplx(0, 0), Cplx(-1, 0)}));
}

// Control on the first (most significant) gate index bit.
inline Unitary cnot() {
    Matrix m = Matrix::identity(4);
    m(2, 2) = m(3, 3) = Cplx(0, 0);
    m(2, 3) = m(3, 2) = Cplx(1, 0);
    return Unitary(std::move(m));
}

inline Unitary toffoli() {
    Matrix m = Matrix::identity(8);
    m(6, 6) = m(7, 7) = Cplx(0, 0);
    m(6, 7) = m(7, 6) = Cplx(1, 0);
    return Unitary(std::move(m));
}

}  // namespace gates

// ---------------------------------------------------------------------------
// Operations

// Kronecker product with the left operand on the high-order index bits.
inline Matrix tensor_product(const Matrix& a, const Matrix& b,
                             std::size_t max_dim = kDefaultMaxDim) {
    if (!detail::is_power_of_two(a.rows()) || !detail::is_power_of_two(a.cols()) ||
        !detail::is_power_of_two(b.rows()) || !detail::is_power_of_two(b.cols())) {
        throw ArgumentError("tensor_product: dimensions must be powers of two");
    }
    if (a.rows() * b.rows() > max_dim || a.cols() * b.cols() > max_dim) {
        throw CapacityError("tensor_product: result exceeds max dimension");
    }
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar)
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const Cplx v = a(ar, ac);
            if (v == Cplx(0.0, 0.0)) continue;
            for (std::size_t br = 0; br < b.rows(); ++br)
                for (std::size_t bc = 0; bc < b.cols(); ++bc)
                    out(ar * b.rows() + br, ac * b.cols() + bc) = v * b(br, bc);
        }
    return out;
}

inline StateVector tensor_product(const StateVector& a, const StateVector& b,
                                  std::size_t max_dim = kDefaultMaxDim) {
    if (a.dim() * b.dim() > max_dim) {
        throw CapacityError("tensor_product: result exceeds max dimension");
    }
    std::vector<Cplx> out(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j) out[i * b.dim() + j] = a[i] * b[j];
    return StateVector(a.num_qubits() + b.num_qubits(), std::move(out));
}

namespace detail {

inline void check_targets(std::size_t num_qubits, std::span<const std::size_t> targets) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] >= num_qubits) throw ArgumentError("target qubit out of range");
        for (std::size_t j = i + 1; j < targets.size(); ++j) {
            if (targets[i] == targets[j]) throw ArgumentError("repeated target qubit");
        }
    }
}

}  // namespace detail

// Applies `gate` to the listed qubits (identity on the rest). targets[0]
// corresponds to the most significant bit of the gate's own index.
inline StateVector apply_unitary(const StateVector& psi, const Matrix& gate,
                                 std::span<const std::size_t> targets) {
    const std::size_t n = psi.num_qubits();
    const std::size_t k = targets.size();
    if (k == 0) throw ArgumentError("apply_unitary: no target qubits");
    detail::check_targets(n, targets);
    const std::size_t gdim = std::size_t{1} << k;
    if (gate.rows() != gdim || gate.cols() != gdim) {
        throw ArgumentError("apply_unitary: gate dimension does not match target count");
    }

    // Bit position (from LSB) of each target within the state index.
    std::vector<std::size_t> shift(k);
    std::size_t target_mask = 0;
    for (std::size_t j = 0; j < k; ++j) {
        shift[j] = n - 1 - targets[j];
        target_mask |= std::size_t{1} << shift[j];
    }

    StateVector out = psi;
    std::vector<Cplx> in_block(gdim), out_block(gdim);
    std::vector<std::size_t> idx(gdim);
    for (std::size_t base = 0; base < psi.dim(); ++base) {
        if (base & target_mask) continue;  // visit each block once
        for (std::size_t g = 0; g < gdim; ++g) {
            std::size_t address = base;
            for (std::size_t j = 0; j < k; ++j) {
                if ((g >> (k - 1 - j)) & 1) address |= std::size_t{1} << shift[j];
            }
            idx[g] = address;
            in_block[g] = psi.amps_[address];
        }
        for (std::size_t r = 0; r < gdim; ++r) {
            Cplx acc(0.0, 0.0);
            for (std::size_t c = 0; c < gdim; ++c) acc += gate(r, c) * in_block[c];
            out_block[r] = acc;
        }
        for (std::size_t g = 0; g < gdim; ++g) out.amps_[idx[g]] = out_block[g];
    }

    const double norm = out.norm();
    if (std::abs(norm - 1.0) > kAlgebraTol) {
        throw InternalError("apply_unitary: norm not preserved (gate not unitary?)");
    }
    return out;
}

inline StateVector apply_unitary(const StateVector& psi, const Unitary& gate,
                                 std::span<const std::size_t> targets) {
    return apply_unitary(psi, gate.matrix(), targets);
}

inline StateVector apply_unitary(const StateVector& psi, const Unitary& gate,
                                 std::initializer_list<std::size_t> targets) {
    return apply_unitary(psi, gate.matrix(), std::span<const std::size_t>(targets.begin(), targets.size()));
}

// Multi-controlled X without materializing the 2^(k+1) dense gate: flips the
// target bit on every basis state whose control bits are all 1.
inline StateVector apply_mcx(const StateVector& psi, std::span<const std::size_t> controls,
                             std::size_t target) {
    const std::size_t n = psi.num_qubits();
    std::vector<std::size_t> all(controls.begin(), controls.end());
    all.push_back(target);
    detail::check_targets(n, all);

    std::size_t control_mask = 0;
    for (const std::size_t c : controls) control_mask |= std::size_t{1} << (n - 1 - c);
    const std::size_t target_bit = std::size_t{1} << (n - 1 - target);

    StateVector out = psi;
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        if ((i & control_mask) == control_mask && !(i & target_bit)) {
            std::swap(out.amps_[i], out.amps_[i | target_bit]);
        }
    }
    return out;
}

// Reduced state on `keep` (ordered: result qubit j is input qubit keep[j]).
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
    const std::size_t n = rho.num_qubits();
    if (keep.empty()) throw ArgumentError("partial_trace: keep set must be nonempty");
    detail::check_targets(n, keep);

    const std::size_t m = keep.size();
    std::vector<std::size_t> keep_shift(m);
    std::size_t keep_mask = 0;
    for (std::size_t j = 0; j < m; ++j) {
        keep_shift[j] = n - 1 - keep[j];
        keep_mask |= std::size_t{1} << keep_shift[j];
    }
    std::vector<std::size_t> traced_shift;
    for (std::size_t b = 0; b < n; ++b) {
        const std::size_t s = n - 1 - b;
        if (!(keep_mask & (std::size_t{1} << s))) traced_shift.push_back(s);
    }

    const std::size_t out_dim = std::size_t{1} << m;
    const std::size_t env_dim = std::size_t{1} << traced_shift.size();

    auto full_index = [&](std::size_t kept_bits, std::size_t env_bits) {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < m; ++j) {
            if ((kept_bits >> (m - 1 - j)) & 1) idx |= std::size_t{1} << keep_shift[j];
        }
        for (std::size_t j = 0; j < traced_shift.size(); ++j) {
            if ((env_bits >> j) & 1) idx |= std::size_t{1} << traced_shift[j];
        }
        return idx;
    };

    Matrix out(out_dim, out_dim);
    for (std::size_t r = 0; r < out_dim; ++r) {
        for (std::size_t c = 0; c < out_dim; ++c) {
            Cplx acc(0.0, 0.0);
            for (std::size_t e = 0; e < env_dim; ++e) {
                acc += rho.matrix()(full_index(r, e), full_index(c, e));
            }
            out(r, c) = acc;
        }
    }
    return DensityMatrix(m, std::move(out));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   std::initializer_list<std::size_t> keep) {
    return partial_trace(rho, std::span<const std::size_t>(keep.begin(), keep.size()));
}

// Rank-1 projector (I + a n.sigma)/2 for outcome a = +/-1 along `dir`.
inline Matrix projector_from_bloch(const BlochDirection& dir, int outcome) {
    if (outcome != 1 && outcome != -1) {
        throw ArgumentError("projector_from_bloch: outcome must be +1 or -1");
    }
    const auto n = dir.unit_vector();
    const double a = static_cast<double>(outcome);
    Matrix p(2, 2);
    p(0, 0) = Cplx(0.5 * (1.0 + a * n[2]), 0.0);
    p(1, 1) = Cplx(0.5 * (1.0 - a * n[2]), 0.0);
    p(0, 1) = Cplx(0.5 * a * n[0], -0.5 * a * n[1]);
    p(1, 0) = Cplx(0.5 * a * n[0], 0.5 * a * n[1]);
    return p;
}

}  // namespace nsbox
