#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "vulncure/core.hpp"

namespace vulncure::severity {

// ---------------------------------------------------------------------------
// Features

inline constexpr std::size_t kFeatureCount = 13;

/// Feature order, serialized with every model.
const std::array<std::string, kFeatureCount>& feature_names();

using FeatureVector = std::array<double, kFeatureCount>;

enum FeatureIndex : std::size_t {
    kAccessVector = 0,
    kAccessComplexity,
    kAuthentication,
    kConfImpact,
    kIntegImpact,
    kAvailImpact,
    kBaseScore,
    kObtainAllPrivilege,
    kObtainUserPrivilege,
    kObtainOtherPrivilege,
    kUserInteractionRequired,
    kCweCode,
    kV2LabelCode,
};

/// CWE identifiers ranked by how many records carry them (most frequent
/// first, ties by id). Placeholders are never ranked.
class CweTable {
public:
    CweTable() = default;
    explicit CweTable(std::vector<std::string> ranked);
    static CweTable from_corpus(const Corpus& corpus);

    const std::vector<std::string>& ranked() const { return ranked_; }
    std::size_t size() const { return ranked_.size(); }

    /// rank/|table| of the record's best-ranked concrete CWE (rank is
    /// 1-based); 0 when the record has only placeholders or unknown ids.
    double code(const std::set<std::string>& cwe_ids) const;

private:
    std::vector<std::string> ranked_;
    std::map<std::string, std::size_t> rank_;
};

/// Ordinal enums scaled onto [0, 1], flags as 0/1, base score / 10.
/// Throws PreconditionError if the record has no v2 assessment.
FeatureVector encode_features(const CveRecord& record, const CweTable& cwe_table);

struct Sample {
    FeatureVector features{};
    double v3_score = 0.0;
    SeverityLabel v2_label = SeverityLabel::Low;
    std::string id;

    SeverityLabel v3_label() const { return score_to_label(v3_score, CvssVersion::V3); }
};

/// Records carrying both a v2 assessment and a v3 score from the feed.
std::vector<Sample> ground_truth(const Corpus& corpus, const CweTable& cwe_table);

// ---------------------------------------------------------------------------
// Random numbers

/// Seeded std::mt19937_64 with platform-independent derivations (the standard
/// distributions are implementation-defined, so they are not used).
class Rng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Dataset split

enum class StratifyOn { V3, V2 };

struct Split {
    std::vector<Sample> train;
    std::vector<Sample> test;
    std::vector<std::string> warnings;
};

/// Per-class shuffle and split; each class contributes round(ratio * n)
/// samples to train. Classes with fewer than two samples stay in train.
Split split_dataset(const std::vector<Sample>& samples, double ratio, std::uint64_t seed,
                    StratifyOn stratify_on = StratifyOn::V3);

// ---------------------------------------------------------------------------
// Models

enum class Activation { Identity, ReLU, Sigmoid };
enum class ModelKind { Linear, DNN };

std::string_view to_string(Activation a);
std::string_view to_string(ModelKind k);

struct Layer {
    Eigen::MatrixXd weights;  ///< out x in
    Eigen::VectorXd biases;   ///< out
    Activation activation = Activation::Identity;
};

struct TrainingMeta {
    std::uint64_t seed = 0;
    int epochs = 0;
    double learning_rate = 0.0;
    int batch_size = 0;
    double initial_train_loss = 0.0;
    double final_train_loss = 0.0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double ridge = 0.0;
    std::string prng = Rng::kAlgorithm;
    std::string init = "uniform(+-sqrt(6/(fan_in+fan_out)))";
    std::size_t train_samples = 0;
};

struct RegressionModel {
    ModelKind kind = ModelKind::DNN;
    std::vector<Layer> layers;
    TrainingMeta meta;
    CweTable cwe_table;

    std::size_t input_width() const;

    /// Raw network outputs (before the x10 rescale) for a batch laid out
    /// one sample per column.
    Eigen::RowVectorXd forward(const Eigen::MatrixXd& inputs) const;

    std::string to_json() const;
    static RegressionModel from_json(std::string_view text);
};

/// DNN hidden widths.
inline const std::vector<std::size_t>& dnn_widths() {
    static const std::vector<std::size_t> w{kFeatureCount, 128, 128, 256, 256, 1};
    return w;
}

/// Fully connected net: ReLU hidden layers, one sigmoid output unit, Glorot
/// uniform weights and zero biases.
RegressionModel make_mlp(const std::vector<std::size_t>& widths, Rng& rng);

/// Mean squared error of a model's raw output against targets in [0, 1], and
/// its gradient with respect to every weight and bias.
struct Gradients {
    double loss = 0.0;
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
};
Gradients loss_and_gradients(const RegressionModel& model, const Eigen::MatrixXd& inputs,
                             const Eigen::RowVectorXd& targets);
double mse_loss(const RegressionModel& model, const Eigen::MatrixXd& inputs, const Eigen::RowVectorXd& targets);

/// Least squares on targets score/10 via ridge-regularized normal equations;
/// the intercept is not penalized.
RegressionModel train_linear(const std::vector<Sample>& train, double ridge = 1e-10);

struct DnnOptions {
    int epochs = 100;
    double learning_rate = 0.001;
    int batch_size = 128;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::vector<std::size_t> widths = dnn_widths();
};

/// Adam on MSE over targets score/10. A fixed seed gives bit-identical weights.
RegressionModel train_dnn(const std::vector<Sample>& train, std::uint64_t seed, const DnnOptions& options = {});

/// Predicted v3 base score in [0, 10].
double predict_score(const RegressionModel& model, const FeatureVector& features);
std::vector<double> predict_scores(const RegressionModel& model, const std::vector<FeatureVector>& features);

// ---------------------------------------------------------------------------
// Evaluation

/// Rows are v2 labels L, M, H; columns v3 labels L, M, H, C. A v3 score of
/// exactly 0 (label None) is counted in the L column.
using TransitionMatrix = std::array<std::array<std::size_t, 4>, 3>;

std::size_t transition_row(SeverityLabel v2_label);
std::size_t transition_column(SeverityLabel v3_label);

struct EvalReport {
    double ae = 0.0;
    double aer = 0.0;
    std::size_t samples = 0;
    std::size_t aer_excluded_zero_targets = 0;
    double overall_accuracy = 0.0;
    std::map<SeverityLabel, double> per_input_class_accuracy;
    TransitionMatrix transition{};

    std::string to_csv() const;
    std::string to_json() const;
};

/// AE and AER on the 0-10 scale; label accuracy under the v3 thresholds.
/// Zero targets count toward AE only. Throws PreconditionError if empty.
EvalReport evaluate(const RegressionModel& model, const std::vector<Sample>& test);

struct BackfillResult {
    Corpus corpus;
    TransitionMatrix transition{};
    std::size_t predicted = 0;
    std::size_t skipped_no_v2 = 0;
};

/// Adds a Predicted v3 assessment to each record with v2 and no feed v3.
/// Feed assessments are never touched.
BackfillResult backfill_v3(const Corpus& corpus, const RegressionModel& model);

/// Feed v2 label x feed v3 label counts.
TransitionMatrix ground_truth_transition(const Corpus& corpus);

std::string transition_csv(const TransitionMatrix& m);

// ---------------------------------------------------------------------------
// PCA

class RankError : public Error {
public:
    using Error::Error;
};

struct PcaResult {
    Eigen::MatrixXd points;      ///< n x k
    Eigen::MatrixXd components;  ///< k x d, orthonormal rows
    Eigen::VectorXd mean;        ///< d
    Eigen::VectorXd variances;   ///< k, nonincreasing
    Eigen::VectorXd explained_variance_ratio;
};

/// Projection onto the top-k principal directions found by power iteration
/// with deflation on the sample covariance.
PcaResult pca_project(const Eigen::MatrixXd& data, std::size_t k, double tolerance = 1e-9,
                      int max_iterations = 1000);
PcaResult pca_project(const std::vector<FeatureVector>& features, std::size_t k = 3);

}  // namespace vulncure::severity
