#include "vulncure/severity.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "vulncure/io.hpp"

namespace vulncure::severity {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Features

const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names{
        "access_vector",          "access_complexity",     "authentication",
        "conf_impact",            "integ_impact",          "avail_impact",
        "base_score",             "obtain_all_privilege",  "obtain_user_privilege",
        "obtain_other_privilege", "user_interaction_required", "cwe_code",
        "v2_label_code"};
    return names;
}

CweTable::CweTable(std::vector<std::string> ranked) : ranked_(std::move(ranked)) {
    for (std::size_t i = 0; i < ranked_.size(); ++i) rank_.emplace(ranked_[i], i + 1);
}

CweTable CweTable::from_corpus(const Corpus& corpus) {
    std::map<std::string, std::size_t> counts;
    for (const auto& [id, r] : corpus.records()) {
        for (const auto& c : r.cwe_ids) {
            if (!is_placeholder_cwe(c)) ++counts[c];
        }
    }
    std::vector<std::pair<std::string, std::size_t>> sorted(counts.begin(), counts.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::string> ranked;
    for (auto& [cwe, _] : sorted) ranked.push_back(cwe);
    return CweTable(std::move(ranked));
}

double CweTable::code(const std::set<std::string>& cwe_ids) const {
    std::size_t best = 0;
    for (const auto& c : cwe_ids) {
        if (auto it = rank_.find(c); it != rank_.end() && (best == 0 || it->second < best)) best = it->second;
    }
    return best == 0 ? 0.0 : static_cast<double>(best) / static_cast<double>(ranked_.size());
}

namespace {

double ordinal(int index, int levels) { return static_cast<double>(index) / static_cast<double>(levels - 1); }

double label_code(SeverityLabel v2) {
    switch (v2) {
        case SeverityLabel::Low: return 0.0;
        case SeverityLabel::Medium: return 0.5;
        default: return 1.0;
    }
}

}  // namespace

FeatureVector encode_features(const CveRecord& record, const CweTable& cwe_table) {
    if (!record.v2) throw PreconditionError(record.id.str() + " has no CVSS v2 assessment to encode");
    const auto& v = *record.v2;
    FeatureVector f{};
    f[kAccessVector] = ordinal(static_cast<int>(v.access_vector), 3);
    f[kAccessComplexity] = ordinal(static_cast<int>(v.access_complexity), 3);
    f[kAuthentication] = ordinal(static_cast<int>(v.authentication), 3);
    f[kConfImpact] = ordinal(static_cast<int>(v.conf_impact), 3);
    f[kIntegImpact] = ordinal(static_cast<int>(v.integ_impact), 3);
    f[kAvailImpact] = ordinal(static_cast<int>(v.avail_impact), 3);
    f[kBaseScore] = v.base_score / 10.0;
    f[kObtainAllPrivilege] = v.obtain_all_privilege ? 1.0 : 0.0;
    f[kObtainUserPrivilege] = v.obtain_user_privilege ? 1.0 : 0.0;
    f[kObtainOtherPrivilege] = v.obtain_other_privilege ? 1.0 : 0.0;
    f[kUserInteractionRequired] = v.user_interaction_required ? 1.0 : 0.0;
    f[kCweCode] = cwe_table.code(record.cwe_ids);
    f[kV2LabelCode] = label_code(v.label());
    return f;
}

std::vector<Sample> ground_truth(const Corpus& corpus, const CweTable& cwe_table) {
    std::vector<Sample> out;
    for (const auto& [id, r] : corpus.records()) {
        if (!r.v2 || !r.v3 || r.v3->provenance != Provenance::FromFeed) continue;
        out.push_back(Sample{encode_features(r, cwe_table), r.v3->base_score, r.v2->label(), id.str()});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rng

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw RangeError("Rng::below(0)");
    const std::uint64_t threshold = (0 - n) % n;
    while (true) {
        const std::uint64_t x = engine_();
        if (x >= threshold) return x % n;
    }
}

// ---------------------------------------------------------------------------
// Split

Split split_dataset(const std::vector<Sample>& samples, double ratio, std::uint64_t seed, StratifyOn stratify_on) {
    if (ratio <= 0.0 || ratio >= 1.0) throw RangeError("split ratio must be in (0, 1)");
    std::map<SeverityLabel, std::vector<std::size_t>> classes;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto label = stratify_on == StratifyOn::V3 ? samples[i].v3_label() : samples[i].v2_label;
        classes[label].push_back(i);
    }
    Split out;
    Rng rng(seed);
    for (auto& [label, idx] : classes) {
        if (idx.size() < 2) {
            out.warnings.push_back("class " + std::string(to_string(label)) + " has " + std::to_string(idx.size()) +
                                   " sample(s); kept whole in train");
            for (auto i : idx) out.train.push_back(samples[i]);
            continue;
        }
        rng.shuffle(idx);
        auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(idx.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
        for (std::size_t k = 0; k < idx.size(); ++k) (k < n_train ? out.train : out.test).push_back(samples[idx[k]]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Models

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::ReLU: return "relu";
        case Activation::Sigmoid: return "sigmoid";
    }
    return "identity";
}

std::string_view to_string(ModelKind k) { return k == ModelKind::Linear ? "linear" : "dnn"; }

namespace {

Activation activation_from_string(std::string_view s) {
    if (s == "identity") return Activation::Identity;
    if (s == "relu") return Activation::ReLU;
    if (s == "sigmoid") return Activation::Sigmoid;
    throw FormatError("unknown activation '" + std::string(s) + "'");
}

Eigen::MatrixXd activate(const Eigen::MatrixXd& z, Activation a) {
    switch (a) {
        case Activation::Identity: return z;
        case Activation::ReLU: return z.cwiseMax(0.0);
        case Activation::Sigmoid: return z.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    }
    return z;
}

Eigen::MatrixXd stack(const std::vector<Sample>& samples) {
    Eigen::MatrixXd x(kFeatureCount, static_cast<Eigen::Index>(samples.size()));
    for (std::size_t j = 0; j < samples.size(); ++j) {
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = samples[j].features[i];
        }
    }
    return x;
}

Eigen::RowVectorXd targets_of(const std::vector<Sample>& samples) {
    Eigen::RowVectorXd y(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t j = 0; j < samples.size(); ++j) y(static_cast<Eigen::Index>(j)) = samples[j].v3_score / 10.0;
    return y;
}

}  // namespace

std::size_t RegressionModel::input_width() const {
    return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().weights.cols());
}

Eigen::RowVectorXd RegressionModel::forward(const Eigen::MatrixXd& inputs) const {
    Eigen::MatrixXd a = inputs;
    for (const auto& layer : layers) {
        Eigen::MatrixXd z = layer.weights * a;
        z.colwise() += layer.biases;
        a = activate(z, layer.activation);
    }
    return a.row(0);
}

RegressionModel make_mlp(const std::vector<std::size_t>& widths, Rng& rng) {
    if (widths.size() < 2 || widths.back() != 1) throw RangeError("MLP needs >= 2 widths ending in 1");
    RegressionModel m;
    m.kind = ModelKind::DNN;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const auto fan_in = static_cast<Eigen::Index>(widths[l]);
        const auto fan_out = static_cast<Eigen::Index>(widths[l + 1]);
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Layer layer;
        layer.weights.resize(fan_out, fan_in);
        for (Eigen::Index r = 0; r < fan_out; ++r)
            for (Eigen::Index c = 0; c < fan_in; ++c) layer.weights(r, c) = rng.uniform(-limit, limit);
        layer.biases = Eigen::VectorXd::Zero(fan_out);
        layer.activation = l + 2 == widths.size() ? Activation::Sigmoid : Activation::ReLU;
        m.layers.push_back(std::move(layer));
    }
    return m;
}

double mse_loss(const RegressionModel& model, const Eigen::MatrixXd& inputs, const Eigen::RowVectorXd& targets) {
    const Eigen::RowVectorXd diff = model.forward(inputs) - targets;
    return diff.squaredNorm() / static_cast<double>(targets.size());
}

Gradients loss_and_gradients(const RegressionModel& model, const Eigen::MatrixXd& inputs,
                             const Eigen::RowVectorXd& targets) {
    const std::size_t depth = model.layers.size();
    std::vector<Eigen::MatrixXd> acts{inputs};
    std::vector<Eigen::MatrixXd> pre;
    acts.reserve(depth + 1);
    pre.reserve(depth);
    for (const auto& layer : model.layers) {
        Eigen::MatrixXd z = layer.weights * acts.back();
        z.colwise() += layer.biases;
        acts.push_back(activate(z, layer.activation));
        pre.push_back(std::move(z));
    }
    const double n = static_cast<double>(targets.size());
    const Eigen::RowVectorXd diff = acts.back().row(0) - targets;

    Gradients g;
    g.loss = diff.squaredNorm() / n;
    g.weights.resize(depth);
    g.biases.resize(depth);

    Eigen::MatrixXd delta = (2.0 / n) * diff;  // dL/dA of the output layer
    for (std::size_t l = depth; l-- > 0;) {
        const auto& layer = model.layers[l];
        switch (layer.activation) {
            case Activation::Identity: break;
            case Activation::ReLU: delta = delta.cwiseProduct((pre[l].array() > 0.0).cast<double>().matrix()); break;
            case Activation::Sigmoid:
                delta = delta.cwiseProduct(acts[l + 1].cwiseProduct((1.0 - acts[l + 1].array()).matrix()));
                break;
        }
        g.weights[l] = delta * acts[l].transpose();
        g.biases[l] = delta.rowwise().sum();
        if (l > 0) delta = layer.weights.transpose() * delta;
    }
    return g;
}

RegressionModel train_linear(const std::vector<Sample>& train, double ridge) {
    if (train.empty()) throw PreconditionError("training set is empty");
    const auto n = static_cast<Eigen::Index>(train.size());
    const auto d = static_cast<Eigen::Index>(kFeatureCount);
    Eigen::MatrixXd x(n, d + 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = train[static_cast<std::size_t>(i)].features[static_cast<std::size_t>(j)];
        x(i, d) = 1.0;
        y(i) = train[static_cast<std::size_t>(i)].v3_score / 10.0;
    }
    Eigen::MatrixXd normal = x.transpose() * x;
    normal.diagonal().head(d).array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> solver(normal);
    if (solver.info() != Eigen::Success || !solver.isPositive() ||
        solver.vectorD().cwiseAbs().minCoeff() <= 1e-300) {
        throw Error("normal equations are singular; raise the ridge term");
    }
    const Eigen::VectorXd beta = solver.solve(x.transpose() * y);

    RegressionModel m;
    m.kind = ModelKind::Linear;
    Layer layer;
    layer.weights = beta.head(d).transpose();
    layer.biases = Eigen::VectorXd::Constant(1, beta(d));
    layer.activation = Activation::Identity;
    m.layers.push_back(std::move(layer));
    m.meta.ridge = ridge;
    m.meta.train_samples = train.size();
    m.meta.init = "closed-form";
    const Eigen::MatrixXd inputs = x.leftCols(d).transpose();
    m.meta.final_train_loss = mse_loss(m, inputs, y.transpose());
    m.meta.initial_train_loss = m.meta.final_train_loss;
    return m;
}

RegressionModel train_dnn(const std::vector<Sample>& train, std::uint64_t seed, const DnnOptions& options) {
    if (train.empty()) throw PreconditionError("training set is empty");
    Rng rng(seed);
    RegressionModel m = make_mlp(options.widths, rng);
    const Eigen::MatrixXd x = stack(train);
    const Eigen::RowVectorXd y = targets_of(train);

    m.meta.seed = seed;
    m.meta.epochs = options.epochs;
    m.meta.learning_rate = options.learning_rate;
    m.meta.batch_size = options.batch_size;
    m.meta.adam_beta1 = options.beta1;
    m.meta.adam_beta2 = options.beta2;
    m.meta.adam_epsilon = options.epsilon;
    m.meta.train_samples = train.size();
    m.meta.initial_train_loss = mse_loss(m, x, y);

    const std::size_t depth = m.layers.size();
    std::vector<Eigen::MatrixXd> mw(depth), vw(depth);
    std::vector<Eigen::VectorXd> mb(depth), vb(depth);
    for (std::size_t l = 0; l < depth; ++l) {
        mw[l] = vw[l] = Eigen::MatrixXd::Zero(m.layers[l].weights.rows(), m.layers[l].weights.cols());
        mb[l] = vb[l] = Eigen::VectorXd::Zero(m.layers[l].biases.size());
    }

    std::vector<Eigen::Index> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
    const auto batch = static_cast<std::size_t>(std::max(1, options.batch_size));
    double b1t = 1.0, b2t = 1.0;

    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + batch);
            const auto cols = static_cast<Eigen::Index>(end - start);
            Eigen::MatrixXd xb(x.rows(), cols);
            Eigen::RowVectorXd yb(cols);
            for (Eigen::Index c = 0; c < cols; ++c) {
                xb.col(c) = x.col(order[start + static_cast<std::size_t>(c)]);
                yb(c) = y(order[start + static_cast<std::size_t>(c)]);
            }
            const auto g = loss_and_gradients(m, xb, yb);
            b1t *= options.beta1;
            b2t *= options.beta2;
            const double step = options.learning_rate * std::sqrt(1.0 - b2t) / (1.0 - b1t);
            // Bias-corrected Adam; epsilon applied to the corrected second moment.
            const double eps_hat = options.epsilon * std::sqrt(1.0 - b2t);
            for (std::size_t l = 0; l < depth; ++l) {
                mw[l] = options.beta1 * mw[l] + (1.0 - options.beta1) * g.weights[l];
                vw[l] = options.beta2 * vw[l] + (1.0 - options.beta2) * g.weights[l].cwiseAbs2();
                mb[l] = options.beta1 * mb[l] + (1.0 - options.beta1) * g.biases[l];
                vb[l] = options.beta2 * vb[l] + (1.0 - options.beta2) * g.biases[l].cwiseAbs2();
                m.layers[l].weights.array() -= step * mw[l].array() / (vw[l].array().sqrt() + eps_hat);
                m.layers[l].biases.array() -= step * mb[l].array() / (vb[l].array().sqrt() + eps_hat);
            }
        }
    }
    m.meta.final_train_loss = mse_loss(m, x, y);
    return m;
}

double predict_score(const RegressionModel& model, const FeatureVector& features) {
    Eigen::MatrixXd x(kFeatureCount, 1);
    for (std::size_t i = 0; i < kFeatureCount; ++i) x(static_cast<Eigen::Index>(i), 0) = features[i];
    return std::clamp(10.0 * model.forward(x)(0), 0.0, 10.0);
}

std::vector<double> predict_scores(const RegressionModel& model, const std::vector<FeatureVector>& features) {
    if (features.empty()) return {};
    Eigen::MatrixXd x(kFeatureCount, static_cast<Eigen::Index>(features.size()));
    for (std::size_t j = 0; j < features.size(); ++j)
        for (std::size_t i = 0; i < kFeatureCount; ++i)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = features[j][i];
    const Eigen::RowVectorXd raw = model.forward(x);
    std::vector<double> out(features.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::clamp(10.0 * raw(static_cast<Eigen::Index>(j)), 0.0, 10.0);
    return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string RegressionModel::to_json() const {
    json layers_json = json::array();
    for (const auto& l : layers) {
        std::vector<double> w;
        w.reserve(static_cast<std::size_t>(l.weights.size()));
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c) w.push_back(l.weights(r, c));
        layers_json.push_back({{"in", l.weights.cols()},
                               {"out", l.weights.rows()},
                               {"activation", to_string(l.activation)},
                               {"weights", w},
                               {"biases", std::vector<double>(l.biases.data(), l.biases.data() + l.biases.size())}});
    }
    json doc = {{"format", "vulncure-severity-model"},
                {"format_version", 1},
                {"kind", to_string(kind)},
                {"output", "sigmoid-or-identity output x 10, clamped to [0, 10]"},
                {"feature_order", feature_names()},
                {"cwe_table", cwe_table.ranked()},
                {"layers", layers_json},
                {"training_meta",
                 {{"seed", meta.seed},
                  {"epochs", meta.epochs},
                  {"learning_rate", meta.learning_rate},
                  {"batch_size", meta.batch_size},
                  {"initial_train_loss", meta.initial_train_loss},
                  {"final_train_loss", meta.final_train_loss},
                  {"adam_beta1", meta.adam_beta1},
                  {"adam_beta2", meta.adam_beta2},
                  {"adam_epsilon", meta.adam_epsilon},
                  {"ridge", meta.ridge},
                  {"prng", meta.prng},
                  {"init", meta.init},
                  {"train_samples", meta.train_samples}}}};
    return doc.dump(1) + "\n";
}

RegressionModel RegressionModel::from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("model file is not JSON: ") + e.what());
    }
    try {
        if (doc.at("format") != "vulncure-severity-model") throw FormatError("not a severity model file");
        const auto order = doc.at("feature_order").get<std::vector<std::string>>();
        if (order.size() != kFeatureCount || !std::equal(order.begin(), order.end(), feature_names().begin())) {
            throw FormatError("model feature order differs from this encoder");
        }
        RegressionModel m;
        m.kind = doc.at("kind") == "linear" ? ModelKind::Linear : ModelKind::DNN;
        m.cwe_table = CweTable(doc.at("cwe_table").get<std::vector<std::string>>());
        for (const auto& lj : doc.at("layers")) {
            Layer l;
            const auto in = lj.at("in").get<Eigen::Index>();
            const auto out = lj.at("out").get<Eigen::Index>();
            const auto w = lj.at("weights").get<std::vector<double>>();
            const auto b = lj.at("biases").get<std::vector<double>>();
            if (static_cast<Eigen::Index>(w.size()) != in * out || static_cast<Eigen::Index>(b.size()) != out) {
                throw FormatError("layer weight count does not match its shape");
            }
            l.weights.resize(out, in);
            for (Eigen::Index r = 0; r < out; ++r)
                for (Eigen::Index c = 0; c < in; ++c) l.weights(r, c) = w[static_cast<std::size_t>(r * in + c)];
            l.biases = Eigen::Map<const Eigen::VectorXd>(b.data(), out);
            l.activation = activation_from_string(lj.at("activation").get<std::string>());
            m.layers.push_back(std::move(l));
        }
        for (std::size_t i = 1; i < m.layers.size(); ++i) {
            if (m.layers[i].weights.cols() != m.layers[i - 1].weights.rows()) throw FormatError("layer widths do not chain");
        }
        if (m.layers.empty() || m.input_width() != kFeatureCount || m.layers.back().weights.rows() != 1) {
            throw FormatError("model must map 13 features to one output");
        }
        const auto& t = doc.at("training_meta");
        m.meta.seed = t.at("seed").get<std::uint64_t>();
        m.meta.epochs = t.at("epochs").get<int>();
        m.meta.learning_rate = t.at("learning_rate").get<double>();
        m.meta.batch_size = t.at("batch_size").get<int>();
        m.meta.initial_train_loss = t.at("initial_train_loss").get<double>();
        m.meta.final_train_loss = t.at("final_train_loss").get<double>();
        m.meta.adam_beta1 = t.at("adam_beta1").get<double>();
        m.meta.adam_beta2 = t.at("adam_beta2").get<double>();
        m.meta.adam_epsilon = t.at("adam_epsilon").get<double>();
        m.meta.ridge = t.at("ridge").get<double>();
        m.meta.prng = t.at("prng").get<std::string>();
        m.meta.init = t.at("init").get<std::string>();
        m.meta.train_samples = t.at("train_samples").get<std::size_t>();
        return m;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed model file: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Evaluation

std::size_t transition_row(SeverityLabel v2_label) {
    switch (v2_label) {
        case SeverityLabel::Low: return 0;
        case SeverityLabel::Medium: return 1;
        case SeverityLabel::High: return 2;
        default: throw RangeError("v2 labels are Low, Medium or High");
    }
}

std::size_t transition_column(SeverityLabel v3_label) {
    switch (v3_label) {
        case SeverityLabel::None:
        case SeverityLabel::Low: return 0;
        case SeverityLabel::Medium: return 1;
        case SeverityLabel::High: return 2;
        case SeverityLabel::Critical: return 3;
    }
    return 0;
}

EvalReport evaluate(const RegressionModel& model, const std::vector<Sample>& test) {
    if (test.empty()) throw PreconditionError("test set is empty");
    std::vector<FeatureVector> features;
    features.reserve(test.size());
    for (const auto& s : test) features.push_back(s.features);
    const auto predicted = predict_scores(model, features);

    EvalReport r;
    r.samples = test.size();
    double abs_sum = 0.0, rel_sum = 0.0;
    std::size_t rel_n = 0, correct = 0;
    std::map<SeverityLabel, std::pair<std::size_t, std::size_t>> per_class;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const double truth = test[i].v3_score;
        const double err = std::abs(truth - predicted[i]);
        abs_sum += err;
        if (truth > 0.0) {
            rel_sum += err / truth;
            ++rel_n;
        } else {
            ++r.aer_excluded_zero_targets;
        }
        const auto pred_label = score_to_label(predicted[i], CvssVersion::V3);
        const bool hit = pred_label == test[i].v3_label();
        correct += hit ? 1 : 0;
        auto& [n, k] = per_class[test[i].v2_label];
        ++n;
        k += hit ? 1 : 0;
        ++r.transition[transition_row(test[i].v2_label)][transition_column(pred_label)];
    }
    r.ae = abs_sum / static_cast<double>(test.size());
    r.aer = rel_n ? rel_sum / static_cast<double>(rel_n) : 0.0;
    r.overall_accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
    for (const auto& [label, nk] : per_class) {
        r.per_input_class_accuracy[label] = static_cast<double>(nk.second) / static_cast<double>(nk.first);
    }
    return r;
}

std::string transition_csv(const TransitionMatrix& m) {
    static constexpr const char* rows[] = {"L", "M", "H"};
    std::string out = "v2,L,M,H,C\n";
    for (std::size_t r = 0; r < 3; ++r) {
        out += rows[r];
        for (std::size_t c = 0; c < 4; ++c) out += "," + std::to_string(m[r][c]);
        out += "\n";
    }
    return out;
}

std::string EvalReport::to_csv() const {
    std::string out = "metric,value\n";
    out += "samples," + std::to_string(samples) + "\n";
    out += "ae," + io::format_fixed(ae, 6) + "\n";
    out += "aer," + io::format_fixed(aer, 6) + "\n";
    out += "aer_excluded_zero_targets," + std::to_string(aer_excluded_zero_targets) + "\n";
    out += "overall_accuracy," + io::format_fixed(overall_accuracy, 6) + "\n";
    for (const auto& [label, acc] : per_input_class_accuracy) {
        out += "accuracy_v2_" + to_lower(to_string(label)) + "," + io::format_fixed(acc, 6) + "\n";
    }
    return out;
}

std::string EvalReport::to_json() const {
    json per_class = json::object();
    for (const auto& [label, acc] : per_input_class_accuracy) per_class[std::string(to_string(label))] = acc;
    json doc = {{"samples", samples},
                {"ae", ae},
                {"aer", aer},
                {"aer_excluded_zero_targets", aer_excluded_zero_targets},
                {"overall_accuracy", overall_accuracy},
                {"per_input_class_accuracy", per_class},
                {"transition", {{"rows", {"L", "M", "H"}}, {"columns", {"L", "M", "H", "C"}}, {"counts", transition}}}};
    return doc.dump(1) + "\n";
}

BackfillResult backfill_v3(const Corpus& corpus, const RegressionModel& model) {
    BackfillResult out;
    std::vector<CveId> ids;
    std::vector<FeatureVector> features;
    for (const auto& [id, r] : corpus.records()) {
        if (r.v3 && r.v3->provenance == Provenance::FromFeed) continue;
        if (!r.v2) {
            ++out.skipped_no_v2;
            continue;
        }
        ids.push_back(id);
        features.push_back(encode_features(r, model.cwe_table));
    }
    const auto scores = predict_scores(model, features);
    Corpus::RecordMap records = corpus.records();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto& r = records.at(ids[i]);
        r.v3 = CvssV3Assessment::make(scores[i], Provenance::Predicted);
        ++out.transition[transition_row(r.v2->label())][transition_column(r.v3->label)];
        ++out.predicted;
    }
    out.corpus = Corpus(std::move(records));
    return out;
}

TransitionMatrix ground_truth_transition(const Corpus& corpus) {
    TransitionMatrix m{};
    for (const auto& [id, r] : corpus.records()) {
        if (!r.v2 || !r.v3 || r.v3->provenance != Provenance::FromFeed) continue;
        ++m[transition_row(r.v2->label())][transition_column(r.v3->label)];
    }
    return m;
}

// ---------------------------------------------------------------------------
// PCA

PcaResult pca_project(const Eigen::MatrixXd& data, std::size_t k, double tolerance, int max_iterations) {
    const auto n = data.rows();
    const auto d = data.cols();
    if (n < static_cast<Eigen::Index>(k) + 1) throw PreconditionError("PCA needs at least k+1 samples");
    if (static_cast<Eigen::Index>(k) > d) throw RangeError("PCA k exceeds the data dimension");

    PcaResult out;
    out.mean = data.colwise().mean().transpose();
    const Eigen::MatrixXd centered = data.rowwise() - out.mean.transpose();
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
    const double total = cov.trace();
    if (!(total > 1e-300)) throw RankError("data has zero variance; no principal directions");

    out.components.resize(static_cast<Eigen::Index>(k), d);
    out.variances.resize(static_cast<Eigen::Index>(k));
    const auto orthogonalize = [&](Eigen::VectorXd& v, Eigen::Index found) {
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index j = 0; j < found; ++j) v -= out.components.row(j).dot(v) * out.components.row(j).transpose();
    };

    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(k); ++c) {
        // Start from the largest remaining diagonal direction, nudged so it is
        // not orthogonal to the dominant eigenvector by construction.
        Eigen::VectorXd v = Eigen::VectorXd::Constant(d, 1e-3);
        Eigen::Index arg = 0;
        cov.diagonal().maxCoeff(&arg);
        v(arg) += 1.0;
        orthogonalize(v, c);
        if (v.norm() < 1e-12) {
            for (Eigen::Index e = 0; e < d && v.norm() < 1e-12; ++e) {
                v = Eigen::VectorXd::Unit(d, e);
                orthogonalize(v, c);
            }
        }
        v.normalize();
        for (int it = 0; it < max_iterations; ++it) {
            Eigen::VectorXd w = cov * v;
            orthogonalize(w, c);
            const double norm = w.norm();
            if (norm < 1e-300) break;  // remaining variance is zero; keep v
            w /= norm;
            const double change = (w - v).norm();
            v = w;
            if (change < tolerance) break;
        }
        const double lambda = std::max(0.0, v.dot(cov * v));
        out.components.row(c) = v.transpose();
        out.variances(c) = lambda;
        cov -= lambda * v * v.transpose();
    }
    out.points = centered * out.components.transpose();
    out.explained_variance_ratio = out.variances / total;
    return out;
}

PcaResult pca_project(const std::vector<FeatureVector>& features, std::size_t k) {
    Eigen::MatrixXd data(static_cast<Eigen::Index>(features.size()), static_cast<Eigen::Index>(kFeatureCount));
    for (std::size_t i = 0; i < features.size(); ++i)
        for (std::size_t j = 0; j < kFeatureCount; ++j)
            data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = features[i][j];
    return pca_project(data, k);
}

}  // namespace vulncure::severity
