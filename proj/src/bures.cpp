#include <cmath>
#include <limits>

#include "fbell/errors.hpp"
#include "fbell/tomography.hpp"

namespace fbell {

BuresParameterVector BuresParameterVector::draw(Rng& rng) {
    BuresParameterVector p;
    for (auto& v : p.x) v = rng.normal();
    return p;
}

Matrix4c haar_unitary(const Matrix4c& z) {
    Matrix4c q;
    for (int j = 0; j < 4; ++j) {
        Vector4c v = z.col(j);
        for (int i = 0; i < j; ++i) v -= q.col(i).dot(v) * q.col(i);
        const double nrm = v.norm();
        if (!(nrm > 0.0)) throw NumericalFailure("haar_unitary: rank-deficient Ginibre draw");
        q.col(j) = v / nrm;
    }
    return q;
}

namespace {

Matrix4c unpack(const double* re_im) {
    Matrix4c m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = cplx(re_im[4 * r + c], re_im[16 + 4 * r + c]);
    return m;
}

}  // namespace

Matrix4c bures_matrix(const BuresParameterVector& params) {
    const Matrix4c g = unpack(params.x.data());
    const Matrix4c u = haar_unitary(unpack(params.x.data() + 32));
    const Matrix4c a = (Matrix4c::Identity() + u) * g;
    Matrix4c rho = a * a.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double tr = rho.trace().real();
    if (!(tr > 0.0) || !std::isfinite(tr)) throw NumericalFailure("bures_matrix: zero trace");
    return rho / tr;
}

DensityMatrix bures_density(const BuresParameterVector& params) { return DensityMatrix(bures_matrix(params)); }

PovmSet build_povm(const MeasurementBasis& basis) {
    PovmSet set;
    set.basis = basis;
    const Eigen::Matrix2cd w = transfer_matrix(basis);
    Matrix4c sum = Matrix4c::Zero();
    for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
            // Detection amplitude is v^+ c with v_mn = conj(W(k, m) W(l, n)).
            Vector4c v;
            for (int m = 0; m < 2; ++m)
                for (int n = 0; n < 2; ++n) v(2 * m + n) = std::conj(w(k, m) * w(l, n));
            const int idx = 2 * k + l;
            set.vectors[idx] = v;
            set.elements[idx] = v * v.adjoint();
            sum += set.elements[idx];
        }
    }
    set.remainder = Matrix4c::Identity() - sum;
    return set;
}

ProbTable povm_probs(const PovmSet& povm, const Matrix4c& rho) {
    ProbTable p{};
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) p[k][l] = (povm.elements[2 * k + l] * rho).trace().real();
    return p;
}

std::vector<CountTable> subtract_accidentals(const std::vector<CountTable>& tables) {
    std::vector<CountTable> out = tables;
    for (auto& t : out) {
        t.counts = t.subtracted();
        t.accidentals = CountGrid{};
    }
    return out;
}

LikelihoodModel::LikelihoodModel(const std::vector<CountTable>& tables) {
    for (const auto& t : tables) {
        if (t.total() == 0) continue;  // contributes exactly zero
        const PovmSet povm = build_povm(t.basis);
        Term term;
        term.vectors = povm.vectors;
        for (int i = 0; i < 4; ++i) term.counts[i] = static_cast<double>(t.counts[i / 2][i % 2]);
        terms_.push_back(term);
    }
}

double LikelihoodModel::operator()(const Matrix4c& rho) const {
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    double ll = 0.0;
    for (const auto& term : terms_) {
        std::array<double, 4> p;
        double total = 0.0;
        for (int i = 0; i < 4; ++i) {
            p[i] = std::max(0.0, term.vectors[i].dot(rho * term.vectors[i]).real());
            total += p[i];
        }
        if (!(total > 0.0)) return kNegInf;
        for (int i = 0; i < 4; ++i) {
            if (term.counts[i] == 0.0) continue;
            if (p[i] == 0.0) return kNegInf;
            ll += term.counts[i] * std::log(p[i] / total);
        }
    }
    return ll;
}

double log_likelihood(const std::vector<CountTable>& tables, const DensityMatrix& rho) {
    if (tables.empty()) throw ContractViolation("log_likelihood: no count tables");
    return LikelihoodModel(tables)(rho.elements());
}

}  // namespace fbell
