#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sigver/dataset.hpp"
#include "sigver/evaluate.hpp"
#include "sigver/feature_select.hpp"
#include "sigver/reference_model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace sigver;

namespace {

GeneratorConfig make_generator_config(int users, int genuine, int forgery, int features,
                                      int planted, double separation, double noise) {
    GeneratorConfig config;
    config.n_users = users;
    config.genuine_per_user = genuine;
    config.forgery_per_user = forgery;
    config.feature_count = features;
    config.planted_count = planted;
    config.separation = separation;
    config.noise = noise;
    return config;
}

SelectionParams make_selection_params(int d, int p, int k_c, const std::string& weighting,
                                      double heat_sigma) {
    SelectionParams params;
    params.d = d;
    params.p = p;
    params.k_c = k_c;
    params.weighting = parse_weighting(weighting);
    params.heat_sigma = heat_sigma;
    return params;
}

// corpus as per-user matrices: {"users": [...], "genuine": {...}, "forgery": {...},
// "planted": {...}}
py::dict generate(int users, int genuine, int forgery, int features, int planted,
                  double separation, double noise, std::uint64_t seed) {
    const auto [data, truth] = generate_synthetic(
        make_generator_config(users, genuine, forgery, features, planted, separation, noise),
        seed);
    py::dict genuine_map, forgery_map, planted_map;
    py::list user_list;
    for (const auto& user : data.users()) {
        user_list.append(user);
        genuine_map[py::str(user)] = data.matrix(data.genuine_of(user));
        forgery_map[py::str(user)] = data.matrix(data.forgeries_of(user));
        planted_map[py::str(user)] = truth.planted.at(user);
    }
    py::dict out;
    out["users"] = std::move(user_list);
    out["genuine"] = std::move(genuine_map);
    out["forgery"] = std::move(forgery_map);
    out["planted"] = std::move(planted_map);
    return out;
}

py::tuple standardize(const Eigen::MatrixXd& X) {
    const Normalization norm = fit_normalization(X);
    return py::make_tuple(apply_normalization(X, norm), norm.mean, norm.scale);
}

py::tuple select_features(const Eigen::MatrixXd& standardized, int d, int p, int k_c,
                          const std::string& weighting, double heat_sigma) {
    const FeatureSelection selection = select_user_features(
        standardized, make_selection_params(d, p, k_c, weighting, heat_sigma));
    return py::make_tuple(selection.indices, selection.scores);
}

UserModel enroll(const std::string& user_id, const Eigen::MatrixXd& train, int d, int clusters,
                 double alpha, double tau, int p, int k_c, const std::string& weighting,
                 double heat_sigma, double fuzzifier, std::uint64_t seed) {
    EnrollParams params;
    params.selection = make_selection_params(d, p, k_c, weighting, heat_sigma);
    params.clusters = clusters;
    params.fuzzifier = fuzzifier;
    params.alpha = alpha;
    params.tau = tau;
    return enroll_user(user_id, train, params, seed);
}

// generate a corpus and run one evaluation protocol over it
py::tuple protocol_eer(int users, int genuine, int forgery, int features, int planted,
                       double separation, double noise, std::uint64_t corpus_seed,
                       const std::string& protocol, int d, int clusters, double alpha, int trials,
                       std::uint64_t master_seed, int jobs) {
    const auto [data, truth] = generate_synthetic(
        make_generator_config(users, genuine, forgery, features, planted, separation, noise),
        corpus_seed);
    (void)truth;
    EvalConfig config;
    config.protocol = parse_protocol(protocol);
    config.n_trials = trials;
    config.enroll.selection.d = d;
    config.enroll.clusters = clusters;
    config.enroll.alpha = alpha;
    config.master_seed = master_seed;
    config.jobs = jobs;
    const ProtocolReport report = run_protocol(data, config);
    return py::make_tuple(report.mean_eer, report.trial_eers);
}

std::vector<std::pair<double, double>> reference_intervals(const ReferenceInterval& ref) {
    return ref.intervals;
}

} // namespace

PYBIND11_MODULE(_sigver, m) {
    m.doc() = "writer-dependent signature verification core";

    py::class_<ReferenceInterval>(m, "ReferenceInterval")
        .def_readonly("cluster_id", &ReferenceInterval::cluster_id)
        .def_readonly("member_count", &ReferenceInterval::member_count)
        .def_property_readonly("intervals", &reference_intervals);

    py::class_<VerificationResult>(m, "VerificationResult")
        .def_readonly("acceptance_count", &VerificationResult::acceptance_count)
        .def_readonly("best_cluster", &VerificationResult::best_cluster)
        .def_readonly("per_cluster_counts", &VerificationResult::per_cluster_counts)
        .def_readonly("accepted", &VerificationResult::accepted)
        .def_readonly("tau_used", &VerificationResult::tau_used);

    py::class_<UserModel>(m, "UserModel")
        .def_readonly("user_id", &UserModel::user_id)
        .def_readonly("selected_indices", &UserModel::selected_indices)
        .def_readonly("alpha", &UserModel::alpha)
        .def_readonly("tau", &UserModel::tau)
        .def_readonly("references", &UserModel::references)
        .def_property_readonly(
            "mean", [](const UserModel& model) { return model.normalization.mean; })
        .def_property_readonly(
            "scale", [](const UserModel& model) { return model.normalization.scale; })
        .def(
            "verify",
            [](const UserModel& model, const Eigen::VectorXd& features,
               std::optional<double> tau) { return verify(features, model, tau); },
            py::arg("features"), py::arg("tau") = std::nullopt);

    m.def("generate", &generate, py::arg("users"), py::arg("genuine"), py::arg("forgery"),
          py::arg("features"), py::arg("planted"), py::arg("separation") = 4.0,
          py::arg("noise") = 1.0, py::arg("seed") = 7);
    m.def("standardize", &standardize, py::arg("X"),
          "per-feature z-scoring; returns (Z, mean, scale)");
    m.def("select_features", &select_features, py::arg("standardized"), py::arg("d"),
          py::arg("p") = 5, py::arg("k_c") = 5, py::arg("weighting") = "heat_kernel",
          py::arg("heat_sigma") = 0.0, "returns (selected indices, all feature scores)");
    m.def("enroll", &enroll, py::arg("user_id"), py::arg("train"), py::arg("d"),
          py::arg("clusters") = 0, py::arg("alpha") = 2.0, py::arg("tau") = 0.5, py::arg("p") = 5,
          py::arg("k_c") = 5, py::arg("weighting") = "heat_kernel", py::arg("heat_sigma") = 0.0,
          py::arg("fuzzifier") = 2.0, py::arg("seed") = 1);
    m.def("protocol_eer", &protocol_eer, py::arg("users"), py::arg("genuine"), py::arg("forgery"),
          py::arg("features"), py::arg("planted"), py::arg("separation"), py::arg("noise"),
          py::arg("corpus_seed"), py::arg("protocol"), py::arg("d"), py::arg("clusters") = 0,
          py::arg("alpha") = 2.0, py::arg("trials") = 5, py::arg("master_seed") = 1,
          py::arg("jobs") = 1, "returns (mean_eer, per-trial EERs)");
}
