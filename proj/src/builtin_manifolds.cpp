#include "roughmanifold/builtin_manifolds.hpp"

#include <cmath>
#include <sstream>

#include "roughmanifold/frame_bundle.hpp"
#include "roughmanifold/skew.hpp"

namespace roughmanifold {

// ---------------------------------------------------------------- Sphere

Sphere::Sphere(int d, bool two_charts) : d_(d), two_charts_(two_charts) {
    if (d < 1) throw UsageError("sphere: dimension must be positive");
}

std::string Sphere::name() const {
    std::ostringstream os;
    os << "sphere:d=" << d_;
    return os.str();
}

bool Sphere::chart_contains(int chart, const Eigen::VectorXd& x,
                            double margin) const {
    double r = x.norm();
    if (r < 0.2 + 0.3 * margin || r > 5.0 - 3.0 * margin) return false;
    if (!two_charts_) return true;
    double last = x(d_) / r;
    return chart == 0 ? last > -0.8 + 0.4 * margin : last < 0.8 - 0.4 * margin;
}

Eigen::VectorXd Sphere::F(int chart, const Eigen::VectorXd& x) const {
    Eigen::VectorXd f(1);
    f(0) = (chart == 0) ? 0.5 * (x.squaredNorm() - 1.0) : x.norm() - 1.0;
    return f;
}

Eigen::MatrixXd Sphere::dF(int chart, const Eigen::VectorXd& x) const {
    if (chart == 0) return x.transpose();
    return (x / x.norm()).transpose().eval();
}

Eigen::MatrixXd Sphere::d2F_dir(int chart, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& v) const {
    if (chart == 0) return v.transpose();
    double r = x.norm();
    return (v / r - x * (x.dot(v)) / (r * r * r)).transpose();
}

Eigen::MatrixXd Sphere::dQ(const Eigen::VectorXd& m,
                           const Eigen::VectorXd& v) const {
    // Q(x) = x x^T / |x|^2
    double r2 = m.squaredNorm();
    Eigen::MatrixXd out = (v * m.transpose() + m * v.transpose()) / r2 -
                          (2.0 * m.dot(v) / (r2 * r2)) * (m * m.transpose());
    return out;
}

Eigen::VectorXd Sphere::closest_point(const Eigen::VectorXd& y) const {
    double r = y.norm();
    if (r < 1e-8)
        throw NumericError("sphere: closest point undefined near the origin");
    return y / r;
}

// ----------------------------------------------------- SpecialOrthogonal

SpecialOrthogonal::SpecialOrthogonal(int n) : n_(n) {
    if (n < 2) throw UsageError("so: order must be at least 2");
}

std::string SpecialOrthogonal::name() const {
    std::ostringstream os;
    os << "so:n=" << n_;
    return os.str();
}

bool SpecialOrthogonal::chart_contains(int, const Eigen::VectorXd& x,
                                       double margin) const {
    Eigen::MatrixXd g = vec_to_mat(x, n_, n_);
    double dev = (g.transpose() * g - Eigen::MatrixXd::Identity(n_, n_)).norm();
    if (dev > 0.8 - 0.6 * margin) return false;
    return g.determinant() > 0.0;
}

Eigen::VectorXd SpecialOrthogonal::F(int, const Eigen::VectorXd& x) const {
    Eigen::MatrixXd g = vec_to_mat(x, n_, n_);
    Eigen::MatrixXd S = g.transpose() * g - Eigen::MatrixXd::Identity(n_, n_);
    Eigen::VectorXd f(n_ * (n_ + 1) / 2);
    int k = 0;
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j, ++k) f(k) = S(i, j);
    return f;
}

Eigen::MatrixXd SpecialOrthogonal::dF_bilinear(const Eigen::MatrixXd& g) const {
    // Row (i<=j), column (a + n b): d(g^T g)_{ij} / d g_{ab}.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n_ * (n_ + 1) / 2, n_ * n_);
    int k = 0;
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j, ++k)
            for (int a = 0; a < n_; ++a) {
                J(k, a + n_ * i) += g(a, j);
                J(k, a + n_ * j) += g(a, i);
            }
    return J;
}

Eigen::MatrixXd SpecialOrthogonal::dF(int, const Eigen::VectorXd& x) const {
    return dF_bilinear(vec_to_mat(x, n_, n_));
}

Eigen::MatrixXd SpecialOrthogonal::d2F_dir(int, const Eigen::VectorXd&,
                                           const Eigen::VectorXd& v) const {
    return dF_bilinear(vec_to_mat(v, n_, n_));
}

Eigen::VectorXd SpecialOrthogonal::closest_point(const Eigen::VectorXd& y) const {
    Eigen::MatrixXd g = vec_to_mat(y, n_, n_);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues().minCoeff() < 1e-8)
        throw NumericError("so: polar factor undefined (singular input)");
    Eigen::MatrixXd polar = svd.matrixU() * svd.matrixV().transpose();
    if (polar.determinant() < 0.0)
        throw NumericError("so: query lies on the orientation-reversing side");
    return mat_to_vec(polar);
}

// ---------------------------------------------------------------- Affine

Affine::Affine(Eigen::MatrixXd L, Eigen::VectorXd c)
    : L_(std::move(L)), c_(std::move(c)) {
    if (L_.rows() != c_.size()) throw UsageError("affine: L/c size mismatch");
    if (L_.rows() > 0) {
        Eigen::MatrixXd G = L_ * L_.transpose();
        pinv_ = L_.transpose() * G.ldlt().solve(
                                     Eigen::MatrixXd::Identity(L_.rows(), L_.rows()));
    } else {
        pinv_ = Eigen::MatrixXd::Zero(L_.cols(), 0);
    }
}

std::string Affine::name() const {
    std::ostringstream os;
    os << "affine:n=" << L_.cols() << ",d=" << (L_.cols() - L_.rows());
    return os.str();
}

Eigen::VectorXd Affine::F(int, const Eigen::VectorXd& x) const {
    return L_ * x - c_;
}

Eigen::MatrixXd Affine::d2F_dir(int, const Eigen::VectorXd&,
                                const Eigen::VectorXd&) const {
    return Eigen::MatrixXd::Zero(L_.rows(), L_.cols());
}

Eigen::MatrixXd Affine::dQ(const Eigen::VectorXd&, const Eigen::VectorXd&) const {
    return Eigen::MatrixXd::Zero(L_.cols(), L_.cols());
}

Eigen::VectorXd Affine::closest_point(const Eigen::VectorXd& y) const {
    if (L_.rows() == 0) return y;
    return y - pinv_ * (L_ * y - c_);
}

// ------------------------------------------------------- ProductManifold

ProductManifold::ProductManifold(ManifoldPtr a, ManifoldPtr b)
    : a_(std::move(a)), b_(std::move(b)) {}

std::string ProductManifold::name() const {
    return "product:" + a_->name() + "|" + b_->name();
}

int ProductManifold::ambient_dim() const {
    return a_->ambient_dim() + b_->ambient_dim();
}

int ProductManifold::dim() const { return a_->dim() + b_->dim(); }

int ProductManifold::num_charts() const {
    return a_->num_charts() * b_->num_charts();
}

std::pair<int, int> ProductManifold::split_chart(int chart) const {
    return {chart / b_->num_charts(), chart % b_->num_charts()};
}

bool ProductManifold::chart_contains(int chart, const Eigen::VectorXd& x,
                                     double margin) const {
    auto [ca, cb] = split_chart(chart);
    return a_->chart_contains(ca, x.head(a_->ambient_dim()), margin) &&
           b_->chart_contains(cb, x.tail(b_->ambient_dim()), margin);
}

Eigen::VectorXd ProductManifold::F(int chart, const Eigen::VectorXd& x) const {
    auto [ca, cb] = split_chart(chart);
    Eigen::VectorXd fa = a_->F(ca, x.head(a_->ambient_dim()));
    Eigen::VectorXd fb = b_->F(cb, x.tail(b_->ambient_dim()));
    Eigen::VectorXd f(fa.size() + fb.size());
    f << fa, fb;
    return f;
}

Eigen::MatrixXd ProductManifold::dF(int chart, const Eigen::VectorXd& x) const {
    auto [ca, cb] = split_chart(chart);
    int na = a_->ambient_dim(), nb = b_->ambient_dim();
    int ka = a_->codim(), kb = b_->codim();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(ka + kb, na + nb);
    J.topLeftCorner(ka, na) = a_->dF(ca, x.head(na));
    J.bottomRightCorner(kb, nb) = b_->dF(cb, x.tail(nb));
    return J;
}

Eigen::MatrixXd ProductManifold::d2F_dir(int chart, const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& v) const {
    auto [ca, cb] = split_chart(chart);
    int na = a_->ambient_dim(), nb = b_->ambient_dim();
    int ka = a_->codim(), kb = b_->codim();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(ka + kb, na + nb);
    J.topLeftCorner(ka, na) = a_->d2F_dir(ca, x.head(na), v.head(na));
    J.bottomRightCorner(kb, nb) = b_->d2F_dir(cb, x.tail(nb), v.tail(nb));
    return J;
}

bool ProductManifold::has_analytic_d2F() const {
    return a_->has_analytic_d2F() && b_->has_analytic_d2F();
}

Eigen::MatrixXd ProductManifold::dQ(const Eigen::VectorXd& m,
                                    const Eigen::VectorXd& v) const {
    int na = a_->ambient_dim(), nb = b_->ambient_dim();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(na + nb, na + nb);
    out.topLeftCorner(na, na) = a_->dQ(m.head(na), v.head(na));
    out.bottomRightCorner(nb, nb) = b_->dQ(m.tail(nb), v.tail(nb));
    return out;
}

bool ProductManifold::has_analytic_dQ() const {
    return a_->has_analytic_dQ() && b_->has_analytic_dQ();
}

Eigen::VectorXd ProductManifold::closest_point(const Eigen::VectorXd& y) const {
    Eigen::VectorXd out(y.size());
    out.head(a_->ambient_dim()) = a_->closest_point(y.head(a_->ambient_dim()));
    out.tail(b_->ambient_dim()) = b_->closest_point(y.tail(b_->ambient_dim()));
    return out;
}

// -------------------------------------------------------------- registry

namespace {

long parse_param(const std::string& body, const std::string& key) {
    auto pos = body.find(key + "=");
    if (pos == std::string::npos)
        throw UsageError("manifold key: missing parameter '" + key + "'");
    return std::stol(body.substr(pos + key.size() + 1));
}

} // namespace

ManifoldPtr make_manifold(const std::string& key) {
    auto colon = key.find(':');
    std::string head = key.substr(0, colon);
    std::string body = colon == std::string::npos ? "" : key.substr(colon + 1);
    if (head == "sphere") return std::make_shared<Sphere>(parse_param(body, "d"));
    if (head == "so")
        return std::make_shared<SpecialOrthogonal>(parse_param(body, "n"));
    if (head == "affine") {
        long n = parse_param(body, "n");
        long d = parse_param(body, "d");
        if (d < 0 || d > n) throw UsageError("affine: need 0 <= d <= n");
        Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n, n).topRows(n - d);
        return std::make_shared<Affine>(L, Eigen::VectorXd::Zero(n - d));
    }
    if (head == "frame") return std::make_shared<FrameBundle>(make_manifold(body));
    if (head == "product") {
        auto bar = body.find('|');
        if (bar == std::string::npos)
            throw UsageError("product: expected product:<a>|<b>");
        return std::make_shared<ProductManifold>(make_manifold(body.substr(0, bar)),
                                                 make_manifold(body.substr(bar + 1)));
    }
    throw UsageError("unknown manifold key: " + key);
}

} // namespace roughmanifold
