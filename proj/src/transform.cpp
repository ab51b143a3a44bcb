#include "cheblat/transform.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace cheblat {

struct TransformPlan::PaduaPath {
    int N0 = 0, N1 = 0;
    DctNd a0, b0, fine;  // axis-0 DCTs on the two sublattices, then axis-1 DCT-I
    std::vector<std::size_t> target;  // fine-grid flat index -> basis position (or npos)
    std::vector<double> scale;
};

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

void check_size(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(want) +
                                    " values, got " + std::to_string(got));
    }
}

std::string key_string(const MultiIndex& k) {
    std::string s = "(";
    for (int a = 0; a < k.dim; ++a) s += (a ? "," : "") + std::to_string(k[a]);
    return s + ")";
}

}  // namespace

TransformPlan::TransformPlan(std::shared_ptr<const ChebyshevLattice> lattice) : lat_(std::move(lattice)) {
    init();
}

TransformPlan::TransformPlan(ChebyshevLattice lattice)
    : lat_(std::make_shared<const ChebyshevLattice>(std::move(lattice))) {
    init();
}

void TransformPlan::init() {
    const auto& lat = *lat_;
    for (const auto& sub : lat.sublattices()) {
        const auto counts = sub.counts();
        const auto bts = sub.boundaries();
        dcts_.emplace_back(counts, bts);
    }

    std::map<std::vector<std::int64_t>, std::size_t> seen;
    class_matrix_.resize(lat.classes().size());
    for (std::size_t c = 0; c < lat.classes().size(); ++c) {
        const auto& cls = lat.classes()[c];
        const std::size_t m = cls.size();
        std::vector<std::int64_t> key{static_cast<std::int64_t>(m)};
        for (double v : cls.response) key.push_back(std::llround(v * 1e6));
        auto it = seen.find(key);
        if (it != seen.end()) {
            class_matrix_[c] = it->second;
            ++table_[it->second].uses;
            continue;
        }
        Eigen::MatrixXd A(m, m);
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t q = 0; q < m; ++q) A(r, q) = cls.response[r * m + q];
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
        const auto& sv = svd.singularValues();
        const double smin = sv(sv.size() - 1), smax = sv(0);
        if (!(smin > 1e-12 * smax)) {
            throw std::runtime_error("singular aliasing matrix for class " + key_string(cls.key));
        }
        Eigen::MatrixXd Minv = A.fullPivLu().inverse();
        AliasingMatrix am;
        am.class_key = cls.key;
        am.m = m;
        am.response = cls.response;
        am.M.resize(m * m);
        const bool snap = is_bravais(lat.family());
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t q = 0; q < m; ++q) {
                double v = Minv(r, q);
                if (snap) {
                    const double s = std::round(v * m) / m;
                    if (std::abs(v - s) < 1e-9) v = s;
                }
                am.M[r * m + q] = v;
            }
        for (auto b : cls.elements) am.members.push_back(lat.basis()[b].index);
        am.condition = smax / smin;
        am.uses = 1;
        seen.emplace(std::move(key), table_.size());
        class_matrix_[c] = table_.size();
        table_.push_back(std::move(am));
    }

    if (lat.family() == Family::Padua) init_padua();
}

void TransformPlan::init_padua() {
    const auto& lat = *lat_;
    const auto& subs = lat.sublattices();
    auto path = std::make_shared<PaduaPath>();
    path->N0 = subs[0].periods[0];
    path->N1 = subs[0].periods[1];
    const int N0 = path->N0, N1 = path->N1, n = lat.resolution();
    {
        const int counts[] = {subs[0].count(0), subs[0].count(1)};
        const BoundaryType bt[] = {BoundaryType::TypeI, BoundaryType::TypeVminus};
        path->a0 = DctNd(counts, bt);
    }
    {
        const int counts[] = {subs[1].count(0), subs[1].count(1)};
        const BoundaryType bt[] = {BoundaryType::TypeII, BoundaryType::TypeVplus};
        path->b0 = DctNd(counts, bt);
    }
    const int rows = N0 / 2 + 1, cols = N1 + 1;
    {
        const int counts[] = {rows, cols};
        const BoundaryType bt[] = {BoundaryType::TypeI, BoundaryType::TypeI};
        path->fine = DctNd(counts, bt);
    }
    path->target.assign(static_cast<std::size_t>(rows) * cols, npos);
    path->scale.assign(path->target.size(), 0.0);
    std::size_t hit = 0;
    for (int i = 0; i < rows; ++i) {
        for (int l = 0; l < cols; ++l) {
            const std::size_t f = static_cast<std::size_t>(i) * cols + l;
            MultiIndex k;
            double s = 1.0;
            if (2 * i == N0) {
                if (i + l > n) continue;
                k = MultiIndex{i, l};
                s = 2.0;
            } else if (i + l <= n) {
                k = MultiIndex{i, l};
            } else {
                k = MultiIndex{N0 - i, N1 - l};
            }
            auto pos = lat.find(k);
            if (!pos) throw std::runtime_error("padua remap left the basis at " + key_string(k));
            path->target[f] = *pos;
            path->scale[f] = s;
            ++hit;
        }
    }
    if (hit != lat.size()) throw std::runtime_error("padua remap is not a bijection");
    padua_ = std::move(path);
}

std::vector<double> TransformPlan::forward(std::span<const double> samples) const {
    std::vector<double> out(size());
    forward(samples, out);
    return out;
}

void TransformPlan::forward(std::span<const double> samples, std::span<double> coeffs) const {
    const auto& lat = *lat_;
    check_size(samples.size(), lat.size(), "forward");
    check_size(coeffs.size(), lat.size(), "forward output");
    require_finite(samples, "forward");
    std::vector<double> F(lat.size());
    for (std::size_t j = 0; j < dcts_.size(); ++j) {
        const std::size_t b = lat.sublattice_begin(j), n = dcts_[j].size();
        dcts_[j].analyze(samples.subspan(b, n), std::span<double>(F).subspan(b, n));
    }
    double rhs[16];
    std::vector<double> big;
    for (std::size_t c = 0; c < lat.classes().size(); ++c) {
        const auto& cls = lat.classes()[c];
        const std::size_t m = cls.size();
        double* v = rhs;
        if (m > 16) {
            big.resize(m);
            v = big.data();
        }
        for (std::size_t r = 0; r < m; ++r) v[r] = F[lat.sublattice_begin(cls.eq_sublattice[r]) + cls.eq_offset[r]];
        const auto& M = table_[class_matrix_[c]].M;
        for (std::size_t p = 0; p < m; ++p) {
            double s = 0;
            for (std::size_t r = 0; r < m; ++r) s += M[p * m + r] * v[r];
            coeffs[cls.elements[p]] = s;
        }
    }
}

std::vector<double> TransformPlan::inverse(std::span<const double> coeffs) const {
    std::vector<double> out(size());
    inverse(coeffs, out);
    return out;
}

void TransformPlan::inverse(std::span<const double> coeffs, std::span<double> samples) const {
    const auto& lat = *lat_;
    check_size(coeffs.size(), lat.size(), "inverse");
    check_size(samples.size(), lat.size(), "inverse output");
    std::vector<double> F(lat.size(), 0.0);
    for (const auto& cls : lat.classes()) {
        const std::size_t m = cls.size();
        for (std::size_t r = 0; r < m; ++r) {
            double s = 0;
            for (std::size_t p = 0; p < m; ++p) s += cls.response[r * m + p] * coeffs[cls.elements[p]];
            F[lat.sublattice_begin(cls.eq_sublattice[r]) + cls.eq_offset[r]] = s;
        }
    }
    for (std::size_t j = 0; j < dcts_.size(); ++j) {
        const std::size_t b = lat.sublattice_begin(j), n = dcts_[j].size();
        dcts_[j].synthesize(std::span<const double>(F).subspan(b, n), samples.subspan(b, n));
    }
}

std::vector<double> TransformPlan::adjoint(std::span<const double> functional) const {
    std::vector<double> out(size());
    adjoint(functional, out);
    return out;
}

void TransformPlan::adjoint(std::span<const double> functional, std::span<double> weights) const {
    const auto& lat = *lat_;
    check_size(functional.size(), lat.size(), "adjoint");
    check_size(weights.size(), lat.size(), "adjoint output");
    std::vector<double> G(lat.size(), 0.0);
    for (std::size_t c = 0; c < lat.classes().size(); ++c) {
        const auto& cls = lat.classes()[c];
        const std::size_t m = cls.size();
        const auto& M = table_[class_matrix_[c]].M;
        for (std::size_t r = 0; r < m; ++r) {
            double s = 0;
            for (std::size_t p = 0; p < m; ++p) s += M[p * m + r] * functional[cls.elements[p]];
            G[lat.sublattice_begin(cls.eq_sublattice[r]) + cls.eq_offset[r]] = s;
        }
    }
    for (std::size_t j = 0; j < dcts_.size(); ++j) {
        const std::size_t b = lat.sublattice_begin(j), n = dcts_[j].size();
        dcts_[j].analyze_transpose(std::span<const double>(G).subspan(b, n), weights.subspan(b, n));
    }
}

std::vector<double> TransformPlan::forward_padua(std::span<const double> samples) const {
    if (!padua_) throw std::invalid_argument("forward_padua requires a Padua lattice");
    const auto& lat = *lat_;
    check_size(samples.size(), lat.size(), "forward_padua");
    require_finite(samples, "forward_padua");
    const auto& P = *padua_;
    const std::size_t na = P.a0.size(), nb = P.b0.size();
    std::vector<double> A(samples.begin(), samples.begin() + na);
    std::vector<double> B(samples.begin() + na, samples.begin() + na + nb);
    const std::size_t axis0[] = {0};
    P.a0.analyze_axes(A, axis0);
    P.b0.analyze_axes(B, axis0);

    // Interleave along axis 1: sublattice A on even fine nodes, B on odd.
    const std::size_t rows = P.fine.shape()[0], cols = P.fine.shape()[1];
    const std::size_t a_rows = P.a0.shape()[0], a_cols = P.a0.shape()[1];
    const std::size_t b_rows = P.b0.shape()[0], b_cols = P.b0.shape()[1];
    std::vector<double> H(rows * cols, 0.0);
    for (std::size_t i = 0; i < a_rows; ++i)
        for (std::size_t z = 0; z < a_cols; ++z) H[i * cols + 2 * z] = A[i * a_cols + z];
    for (std::size_t i = 0; i < b_rows; ++i)
        for (std::size_t z = 0; z < b_cols; ++z) H[i * cols + 2 * z + 1] = B[i * b_cols + z];
    const std::size_t axis1[] = {1};
    P.fine.analyze_axes(H, axis1);

    std::vector<double> out(lat.size());
    for (std::size_t f = 0; f < H.size(); ++f)
        if (P.target[f] != npos) out[P.target[f]] = P.scale[f] * H[f];
    return out;
}

std::vector<std::pair<std::size_t, double>> TransformPlan::alias_project(const MultiIndex& k) const {
    const auto& lat = *lat_;
    std::vector<double> col;
    auto c = lat.response(k, col);
    std::vector<std::pair<std::size_t, double>> out;
    if (!c) return out;
    const auto& cls = lat.classes()[*c];
    const std::size_t m = cls.size();
    const auto& M = table_[class_matrix_[*c]].M;
    for (std::size_t p = 0; p < m; ++p) {
        double s = 0;
        for (std::size_t r = 0; r < m; ++r) s += M[p * m + r] * col[r];
        if (s != 0.0) out.emplace_back(cls.elements[p], s);
    }
    return out;
}

// ---------------------------------------------------------------------------

static Eigen::MatrixXd vandermonde(const ChebyshevLattice& lat) {
    const std::size_t n = lat.size();
    if (n > kDenseOracleLimit) {
        throw std::invalid_argument("dense oracle limited to " + std::to_string(kDenseOracleLimit) +
                                    " points (lattice has " + std::to_string(n) + ")");
    }
    Eigen::MatrixXd V(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) V(i, j) = lat.basis_value(j, lat.thetas()[i].data());
    return V;
}

std::vector<double> dense_oracle(const ChebyshevLattice& lat, std::span<const double> samples) {
    check_size(samples.size(), lat.size(), "dense_oracle");
    require_finite(samples, "dense_oracle");
    const Eigen::MatrixXd V = vandermonde(lat);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(V);
    if (!(lu.rcond() > 1e-14)) throw std::runtime_error("Vandermonde matrix is numerically singular");
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(samples.data(), samples.size());
    Eigen::VectorXd c = lu.solve(b);
    return {c.data(), c.data() + c.size()};
}

double vandermonde_condition(const ChebyshevLattice& lat) {
    const Eigen::MatrixXd V = vandermonde(lat);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(V);
    const auto& s = svd.singularValues();
    return s(0) / s(s.size() - 1);
}

}  // namespace cheblat
