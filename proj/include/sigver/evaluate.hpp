#pragma once

#include "sigver/dataset.hpp"
#include "sigver/knowledgebase.hpp"
#include "sigver/reference_model.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sigver {

struct CurvePoint {
    double tau = 0.0;
    double far = 0.0; // accepted forgeries / total forgeries
    double frr = 0.0; // rejected genuines / total genuines
};

struct ErrorCurve {
    std::vector<CurvePoint> points; // tau ascending
};

// min, min+step, ... up to max (inclusive within float slack).
std::vector<double> make_tau_grid(double tau_min, double tau_max, double tau_step);

// Scores every genuine test against its own model and every forgery against
// the claimed user's model, then thresholds the acceptance counts per tau.
ErrorCurve sweep_thresholds(const std::map<std::string, UserModel>& models,
                            const Dataset& data, const TrialSplit& split,
                            const std::vector<double>& tau_grid);

// Equal-error rate: linear interpolation at the FAR/FRR crossing; midpoint of
// the closest grid point when the curves never cross.
double compute_eer(const ErrorCurve& curve);

struct EvalConfig {
    Protocol protocol = Protocol::skilled_20;
    int n_trials = 20;
    EnrollParams enroll;          // enroll.selection.d is the feature budget
    double tau_min = 0.1;
    double tau_max = 0.9;
    double tau_step = 0.05;
    std::uint64_t master_seed = 1;
    int jobs = 1;
};

struct ProtocolReport {
    std::string protocol;
    std::vector<double> trial_eers;
    double mean_eer = 0.0;
    std::vector<ErrorCurve> trial_curves;
    EvalConfig config;
};

// Per trial: split -> enroll every user -> threshold sweep -> EER. Trials run
// independently (optionally in parallel); output is identical for any jobs.
ProtocolReport run_protocol(const Dataset& data, const EvalConfig& config);

struct FeatureSweepRow {
    int d = 0;
    double mean_eer = 0.0;
    std::vector<double> trial_eers;
};

std::vector<FeatureSweepRow> sweep_feature_counts(const Dataset& data, EvalConfig config,
                                                  const std::vector<int>& d_values);

// Pointwise mean of per-trial curves (all share the tau grid).
ErrorCurve mean_curve(const std::vector<ErrorCurve>& curves);

nlohmann::json report_to_json(const ProtocolReport& report);
nlohmann::json sweep_to_json(const std::vector<FeatureSweepRow>& rows, const EvalConfig& config);
void write_curve_csv(const ErrorCurve& curve, const std::string& path);
void write_sweep_csv(const std::vector<FeatureSweepRow>& rows, const std::string& path);

} // namespace sigver
