#include "roughmanifold/serialization.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "roughmanifold/builtin_manifolds.hpp"
#include "roughmanifold/errors.hpp"

namespace roughmanifold {

namespace {

json control_to_json(const Control& c) {
    json j;
    j["kind"] = c.kind() == Control::Kind::Uniform ? "uniform" : "empirical";
    j["kappa"] = c.kappa();
    j["t0"] = c.t0();
    j["t1"] = c.t1();
    j["note"] = "uniform control calibrated from the measured p-variation; "
                "a modelling choice, not prescribed by the data";
    return j;
}

} // namespace

json to_json(const GridRoughPath& X) {
    json j;
    j["format"] = "roughmanifold.grid_rough_path";
    j["version"] = 1;
    j["p"] = X.p;
    j["control"] = control_to_json(X.control);
    j["grid"] = X.times;
    json values = json::array();
    for (std::size_t k = 0; k < X.times.size(); ++k) {
        json row = json::array();
        for (Eigen::Index i = 0; i < X.dim(); ++i) row.push_back(X.values(i, k));
        values.push_back(std::move(row));
    }
    j["values"] = std::move(values);
    json steps = json::array();
    for (const auto& m : X.step2) {
        json flat = json::array(); // row-major
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
        steps.push_back(std::move(flat));
    }
    j["step2"] = std::move(steps);
    return j;
}

GridRoughPath grid_rough_path_from_json(const json& j) {
    if (j.value("format", "") != "roughmanifold.grid_rough_path")
        throw UsageError("rough path document: unknown format tag");
    if (j.value("version", 0) != 1)
        throw UsageError("rough path document: unsupported version");
    std::vector<double> times = j.at("grid").get<std::vector<double>>();
    const std::size_t m = times.size();
    const auto& vals = j.at("values");
    if (vals.size() != m) throw UsageError("rough path document: values/grid mismatch");
    const std::size_t N = vals.at(0).size();
    Eigen::MatrixXd values(N, m);
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t i = 0; i < N; ++i) values(i, k) = vals.at(k).at(i);
    const auto& steps = j.at("step2");
    if (steps.size() + 1 != m)
        throw UsageError("rough path document: step2/grid mismatch");
    std::vector<Eigen::MatrixXd> step2(steps.size());
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const auto& flat = steps.at(k);
        if (flat.size() != N * N)
            throw UsageError("rough path document: step2 entry has wrong size");
        Eigen::MatrixXd s(N, N);
        for (std::size_t r = 0; r < N; ++r)
            for (std::size_t c = 0; c < N; ++c) s(r, c) = flat.at(r * N + c);
        step2[k] = std::move(s);
    }
    GridRoughPath X = make_grid_rough_path(std::move(times), std::move(values),
                                           std::move(step2), j.at("p").get<double>());
    const auto& jc = j.at("control");
    if (jc.value("kind", "uniform") == "uniform")
        X.control = Control::uniform(jc.at("kappa").get<double>(),
                                     jc.at("t0").get<double>(),
                                     jc.at("t1").get<double>());
    return X;
}

json to_json(const DefectReport& r) {
    json j;
    j["windows"] = r.windows;
    j["constants"] = r.constants;
    j["slope"] = r.slope;
    j["max_raw"] = r.max_raw;
    j["max_constant"] = r.max_constant;
    j["worst_pair"] = {r.worst_s, r.worst_t};
    j["passed"] = r.passed();
    return j;
}

json to_json(const MembershipReport& r) {
    json j;
    j["iq"] = to_json(r.iq);
    j["qi"] = to_json(r.qi);
    j["sym"] = to_json(r.sym);
    j["trace_distance"] = r.trace_distance;
    j["worst_trace_time"] = r.worst_trace_time;
    j["passed"] = r.passed();
    return j;
}

json to_json(const ManifoldRoughPath& X) {
    json j = to_json(X.path());
    j["format"] = "roughmanifold.manifold_rough_path";
    j["manifold"] = X.manifold()->name();
    j["membership"] = to_json(X.membership());
    return j;
}

ManifoldRoughPath manifold_rough_path_from_json(const json& j) {
    json flat = j;
    flat["format"] = "roughmanifold.grid_rough_path";
    GridRoughPath X = grid_rough_path_from_json(flat);
    return ManifoldRoughPath(std::move(X),
                             make_manifold(j.at("manifold").get<std::string>()));
}

void save_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw UsageError("JSON parse error in " + path + ": " + e.what());
    }
    return j;
}

TraceTable read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw UsageError(path + ":1: empty trace file (expected header t,x1,...)");
    std::size_t cols = 1 + static_cast<std::size_t>(
                               std::count(line.begin(), line.end(), ','));
    if (cols < 2 || line.substr(0, 1) != "t")
        throw UsageError(path + ":1: expected header t,x1,...,xN");
    std::vector<double> times;
    std::vector<Eigen::VectorXd> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        Eigen::VectorXd row(cols - 1);
        std::size_t field = 0;
        double t = 0.0;
        while (std::getline(ss, tok, ',')) {
            double v = 0.0;
            try {
                v = std::stod(tok);
            } catch (...) {
                std::ostringstream os;
                os << path << ":" << lineno << ": bad number '" << tok << "'";
                throw UsageError(os.str());
            }
            if (field == 0)
                t = v;
            else if (field < cols)
                row(field - 1) = v;
            ++field;
        }
        if (field != cols) {
            std::ostringstream os;
            os << path << ":" << lineno << ": expected " << cols << " fields, got "
               << field;
            throw UsageError(os.str());
        }
        times.push_back(t);
        rows.push_back(std::move(row));
    }
    if (times.size() < 2)
        throw UsageError(path + ": need at least 2 samples");
    TraceTable tt;
    tt.times = std::move(times);
    tt.values.resize(rows.front().size(), rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) tt.values.col(k) = rows[k];
    return tt;
}

void write_trace_csv(const std::string& path, const std::vector<double>& times,
                     const Eigen::MatrixXd& values) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open for writing: " + path);
    out << "t";
    for (Eigen::Index i = 0; i < values.rows(); ++i) out << ",x" << (i + 1);
    out << "\n";
    out.precision(17);
    for (std::size_t k = 0; k < times.size(); ++k) {
        out << times[k];
        for (Eigen::Index i = 0; i < values.rows(); ++i) out << "," << values(i, k);
        out << "\n";
    }
}

} // namespace roughmanifold
