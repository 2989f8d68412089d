#include "roughmanifold/manifold_path.hpp"

#include <sstream>
#include <unordered_map>

namespace roughmanifold {

std::string MembershipReport::summary() const {
    std::ostringstream os;
    os << (passed() ? "member" : "NOT a member") << "; (IxQ)X " << iq.summary()
       << "; (QxI)X " << qi.summary() << "; sym " << sym.summary()
       << "; trace distance " << trace_distance;
    return os.str();
}

MembershipReport membership_defect(const GridRoughPath& X,
                                   const EmbeddedManifold& M,
                                   double trace_tol) {
    if (X.dim() != M.ambient_dim())
        throw DomainError("membership_defect: ambient dimension mismatch");
    MembershipReport rep;
    const std::size_t m = X.times.size();
    for (std::size_t k = 0; k < m; ++k) {
        double d = M.distance_to(X.values.col(k));
        if (d > rep.trace_distance) {
            rep.trace_distance = d;
            rep.worst_trace_time = X.times[k];
        }
    }
    if (rep.trace_distance > trace_tol) {
        std::ostringstream os;
        os << "membership_defect: trace leaves " << M.name() << " by "
           << rep.trace_distance << " at t=" << rep.worst_trace_time;
        throw DomainError(os.str());
    }

    std::vector<Eigen::MatrixXd> Qs(m);
    for (std::size_t k = 0; k < m; ++k) Qs[k] = M.Q(X.values.col(k));

    double min_window = 2.0 * X.max_mesh();
    DefectAccumulator acc_iq(X.t_begin(), X.t_end(), min_window, X.p, X.control);
    DefectAccumulator acc_qi(X.t_begin(), X.t_end(), min_window, X.p, X.control);
    DefectAccumulator acc_sym(X.t_begin(), X.t_end(), min_window, X.p, X.control);
    PrefixIncrements pre(X);
    auto visit = [&](std::size_t i, std::size_t j) {
        Eigen::MatrixXd l2 = pre.level2_between(i, j);
        double s = X.times[i], t = X.times[j];
        acc_iq.add(s, t, entry_norm(Eigen::MatrixXd(l2 * Qs[i])));
        acc_qi.add(s, t, entry_norm(Eigen::MatrixXd(Qs[i] * l2)));
        Eigen::MatrixXd sym = 0.5 * (l2 + l2.transpose());
        acc_sym.add(s, t, entry_norm(Eigen::MatrixXd(sym * Qs[i])));
    };
    for (std::size_t k = 0; k + 1 < m; ++k) visit(k, k + 1);
    for_sampled_pairs(m, 512, visit);
    rep.iq = acc_iq.finalize();
    rep.qi = acc_qi.finalize();
    rep.sym = acc_sym.finalize();
    return rep;
}

const MembershipReport& ManifoldRoughPath::membership() const {
    if (!membership_)
        membership_ = membership_defect(path_, *M_);
    return *membership_;
}

void ManifoldRoughPath::require_membership() const {
    const MembershipReport& rep = membership();
    if (!rep.passed())
        throw DomainError("rough path fails membership on " + M_->name() + ": " +
                          rep.summary());
}

QxConstraintReport qx_constraint_check(const ManifoldRoughPath& X) {
    X.require_membership();
    const GridRoughPath& P = X.path();
    const EmbeddedManifold& M = *X.manifold();
    const Eigen::Index N = P.dim();
    const std::size_t m = P.times.size();

    double min_window = 2.0 * P.max_mesh();
    DefectAccumulator acc_l2(P.t_begin(), P.t_end(), min_window, P.p, P.control);
    DefectAccumulator acc_tr(P.t_begin(), P.t_end(), min_window, P.p, P.control);
    PrefixIncrements pre(P);

    struct LeftCache {
        Eigen::MatrixXd Q, A;
        std::vector<Eigen::MatrixXd> dQP; // dQ(P e_m)
        int chart = 0;
    };
    std::unordered_map<std::size_t, LeftCache> cache;
    auto left = [&](std::size_t i) -> const LeftCache& {
        auto it = cache.find(i);
        if (it != cache.end()) return it->second;
        LeftCache c;
        Eigen::VectorXd x = P.values.col(i);
        c.chart = M.select_chart(x, 0.0);
        Projections pr = M.projections(c.chart, x);
        c.Q = pr.Q;
        c.A = pr.A;
        c.dQP.resize(N);
        for (Eigen::Index mm = 0; mm < N; ++mm)
            c.dQP[mm] = M.dQ(x, pr.P.col(mm));
        return cache.emplace(i, std::move(c)).first->second;
    };

    auto visit = [&](std::size_t i, std::size_t j) {
        const LeftCache& c = left(i);
        Eigen::VectorXd dx = pre.level1_between(i, j);
        Eigen::MatrixXd l2 = pre.level2_between(i, j);
        Eigen::VectorXd qx = c.Q * dx;
        // level-2 form: Q x_{s,t} - Q (d_{P a} P) b |_{a(x)b = X}; dP = -dQ
        Eigen::VectorXd contracted = Eigen::VectorXd::Zero(N);
        for (Eigen::Index mm = 0; mm < N; ++mm)
            contracted += c.dQP[mm] * l2.row(mm).transpose();
        acc_l2.add(P.times[i], P.times[j],
                   entry_norm(Eigen::VectorXd(qx + c.Q * contracted)));
        // trace-only form: Q x + 1/2 A F''[P x (x) P x]
        Eigen::VectorXd x = P.values.col(i);
        Eigen::VectorXd px = dx - qx;
        Eigen::VectorXd f2 = M.d2F_dir(c.chart, x, px) * px;
        acc_tr.add(P.times[i], P.times[j],
                   entry_norm(Eigen::VectorXd(qx + 0.5 * c.A * f2)));
    };
    for (std::size_t k = 0; k + 1 < m; ++k) visit(k, k + 1);
    for_sampled_pairs(m, 128, visit);

    QxConstraintReport rep;
    rep.level2_form = acc_l2.finalize();
    rep.trace_form = acc_tr.finalize();
    return rep;
}

} // namespace roughmanifold
