#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "qcadmm/admm.hpp"
#include "qcadmm/analysis.hpp"
#include "qcadmm/experiments.hpp"
#include "qcadmm/graph.hpp"
#include "qcadmm/objectives.hpp"

namespace qcadmm {

using json = nlohmann::json;

/// {"n": int, "edges": [[i, j], ...]}
json graph_to_json(const NetworkGraph& g);
NetworkGraph graph_from_json(const json& j);

/// {"type": "quadratic" | "quadratic_box" | "lasso", ...} with the fields of
/// the matching data struct; matrices are lists of rows.
json objective_to_json(const LocalObjective& obj);
LocalObjective objective_from_json(const json& j);

/// {"graph": ..., "objectives": [...], "x0": [...], "alpha0": [...]}; x0 and
/// alpha0 default to zero when absent.
json problem_to_json(const Problem& p);
Problem problem_from_json(const json& j);

json certificate_to_json(const ConvergenceCertificate& c);

/// Header iter,max_agent_error,rms_error,g_norm_u_error,alpha_sum_norm,consensus,fixed_point.
/// Missing metrics are empty cells.
void write_run_record_csv(const RunRecord& rec, std::ostream& out);
json run_record_to_json(const RunRecord& rec);

/// Header scenario,n,e,m,delta,rho,seed,final_error,iters_to_fixed_point,error_bound,iter_bound,bound_ok.
void write_summary_csv(const SweepSummary& s, std::ostream& out);
json summary_to_json(const SweepSummary& s);
SweepSummary summary_from_json(const json& j);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace qcadmm
