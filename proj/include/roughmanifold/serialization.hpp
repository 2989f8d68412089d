#ifndef ROUGHMANIFOLD_SERIALIZATION_HPP
#define ROUGHMANIFOLD_SERIALIZATION_HPP

#include <json.hpp>
#include <string>

#include "roughmanifold/defect_report.hpp"
#include "roughmanifold/grid_rough_path.hpp"
#include "roughmanifold/manifold_path.hpp"

namespace roughmanifold {

using json = nlohmann::json;

json to_json(const GridRoughPath& X);
GridRoughPath grid_rough_path_from_json(const json& j);

json to_json(const DefectReport& r);
json to_json(const MembershipReport& r);

json to_json(const ManifoldRoughPath& X);
ManifoldRoughPath manifold_rough_path_from_json(const json& j);

void save_json(const json& j, const std::string& path);
json load_json(const std::string& path);

/// Trace table with header `t,x1,...,xN`; parse errors carry line numbers.
struct TraceTable {
    std::vector<double> times;
    Eigen::MatrixXd values;
};
TraceTable read_trace_csv(const std::string& path);
void write_trace_csv(const std::string& path, const std::vector<double>& times,
                     const Eigen::MatrixXd& values);

} // namespace roughmanifold

#endif
