// electorate: batch analytics over follower-ID snapshots. Subcommands cover
// ingestion, snapshot diffing, image preprocessing, weak labeling, classifier
// training/evaluation, the two case-study reports and the model-driven
// simulator. Every subcommand is deterministic given (inputs, --seed) and
// reruns produce byte-identical report.json.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <unordered_map>

#include "electorate/affinity.hpp"
#include "electorate/audience.hpp"
#include "electorate/clock.hpp"
#include "electorate/cnn.hpp"
#include "electorate/image.hpp"
#include "electorate/ingest.hpp"
#include "electorate/parallel.hpp"
#include "electorate/report.hpp"
#include "electorate/rng.hpp"
#include "electorate/snapshot.hpp"
#include "electorate/stats.hpp"
#include "electorate/weak_labels.hpp"

namespace fs = std::filesystem;
using electorate::Gender;
using electorate::report::json;
namespace snap = electorate::snap;
namespace audience = electorate::audience;
namespace img = electorate::img;
namespace weak = electorate::weak;
namespace cnn = electorate::cnn;
namespace affinity = electorate::affinity;
namespace stats = electorate::stats;
namespace report = electorate::report;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitBadInput = 2;

struct BadInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOpts {
    std::string out = "out";
    std::string stamp;  // default: current UTC time
    std::uint64_t seed = 0;
    int jobs = 0;
    double alpha = 0.05;
    std::uint64_t min_bytes = img::kDefaultMinBytes;
    std::string model;
    std::string lexicon_dir;
};

std::string utc_stamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

fs::path run_dir(const CommonOpts& opts, const std::string& subcommand) {
    const std::string stamp = opts.stamp.empty() ? utc_stamp() : opts.stamp;
    fs::path dir = fs::path(opts.out) / subcommand / stamp;
    fs::create_directories(dir);
    return dir;
}

void require_file(const fs::path& path, const char* what) {
    if (!fs::exists(path)) throw BadInput(std::string(what) + " not found: " + path.string());
}

snap::Snapshot load_snapshot_checked(const fs::path& path) {
    require_file(path, "snapshot");
    return snap::load(path);
}

std::string fmt(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    return buf;
}

// --- classification sources ------------------------------------------------

struct TensorLibrary {
    std::vector<img::FaceTensor> tensors;
    std::unordered_map<std::uint64_t, std::size_t> by_user;
};

TensorLibrary load_tensor_library(const fs::path& tensors_path, const fs::path& ids_path) {
    require_file(tensors_path, "tensor file");
    require_file(ids_path, "tensor id file");
    TensorLibrary lib;
    lib.tensors = img::read_tensor_file(tensors_path);
    const auto ids = img::read_id_file(ids_path);
    if (ids.size() != lib.tensors.size())
        throw BadInput("tensor/id count mismatch: " + std::to_string(lib.tensors.size()) +
                       " tensors vs " + std::to_string(ids.size()) + " ids");
    lib.by_user.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        lib.tensors[i].user_id = ids[i];
        lib.by_user[ids[i]] = i;
    }
    return lib;
}

// predictions/labels CSV: "user_id,label"; unknown rows are skipped.
std::unordered_map<std::uint64_t, Gender> load_label_map(const fs::path& path) {
    require_file(path, "labels file");
    std::ifstream in(path);
    std::unordered_map<std::uint64_t, Gender> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line == "user_id,label") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw BadInput("labels file: bad line " + std::to_string(line_no) + " in " +
                           path.string());
        const std::uint64_t id = std::stoull(line.substr(0, comma));
        const std::string label = line.substr(comma + 1);
        if (label == "male") out[id] = Gender::male;
        else if (label == "female") out[id] = Gender::female;
        else if (label != "unknown")
            throw BadInput("labels file: bad label '" + label + "' on line " +
                           std::to_string(line_no));
    }
    return out;
}

// Either a trained model over a tensor library or a precomputed label map.
struct Classifier {
    std::optional<cnn::NetworkParams> model;
    const TensorLibrary* library = nullptr;
    std::unordered_map<std::uint64_t, Gender> labels;

    stats::GenderComposition classify_cohort(const std::vector<snap::UserId>& cohort,
                                             const std::string& name, int jobs) const {
        stats::GenderComposition comp;
        comp.cohort = name;
        if (model) {
            std::vector<img::FaceTensor> present;
            present.reserve(cohort.size());
            for (snap::UserId id : cohort) {
                auto it = library->by_user.find(id);
                if (it != library->by_user.end()) present.push_back(library->tensors[it->second]);
            }
            const auto probs = cnn::forward(*model, present, jobs);
            for (const auto& p : probs)
                (p[0] >= p[1] ? comp.male_count : comp.female_count) += 1;
        } else {
            for (snap::UserId id : cohort) {
                auto it = labels.find(id);
                if (it == labels.end()) continue;
                (it->second == Gender::male ? comp.male_count : comp.female_count) += 1;
            }
        }
        return comp;
    }
};

// Empty cohorts (nothing classified, or nobody moved) cannot be tested;
// report a degenerate outcome instead of failing the run.
stats::ZTestResult safe_two_sample_z(const stats::GenderComposition& before,
                                     const stats::GenderComposition& after, Gender tested_class) {
    if (before.total() == 0 || after.total() == 0) {
        stats::ZTestResult r;
        r.tested_class = tested_class;
        r.n1 = before.total();
        r.n2 = after.total();
        r.z = std::numeric_limits<double>::quiet_NaN();
        r.p_value = std::numeric_limits<double>::quiet_NaN();
        r.degenerate = true;
        return r;
    }
    return stats::two_sample_z(before, after, tested_class);
}

Classifier make_classifier(const std::string& model_path, const std::string& tensors_path,
                           const std::string& ids_path, const std::string& labels_path,
                           TensorLibrary& library_storage) {
    Classifier c;
    if (!labels_path.empty()) {
        c.labels = load_label_map(labels_path);
        return c;
    }
    if (model_path.empty() || tensors_path.empty() || ids_path.empty())
        throw BadInput("classification needs either --labels or --model with --tensors/--ids");
    require_file(model_path, "model");
    c.model = cnn::load_model(model_path);
    library_storage = load_tensor_library(tensors_path, ids_path);
    c.library = &library_storage;
    return c;
}

// --- subcommand payloads -----------------------------------------------------

int cmd_ingest(const CommonOpts& opts, const std::string& source_id, const std::string& fixture_dir,
               const std::string& candidate, std::int64_t captured_at, std::uint32_t rate_limit,
               const std::string& out_path) {
    fs::path dir = fixture_dir.empty() ? electorate::ingest::fixture_dir_from_env()
                                       : fs::path(fixture_dir);
    if (dir.empty())
        throw BadInput("no fixture directory: pass --fixture-dir or set ELECTORATE_FIXTURE_DIR");

    electorate::ingest::FixtureSource source(dir, source_id);
    electorate::SystemClock clock;
    electorate::ingest::FetchOptions fetch_opts;
    fetch_opts.rate_limit = rate_limit;
    const snap::Snapshot s =
        electorate::ingest::capture_snapshot(source, fetch_opts, clock, candidate, captured_at);
    snap::save(s, out_path);

    const fs::path rdir = run_dir(opts, "ingest");
    json results;
    results["candidate"] = candidate;
    results["captured_at"] = captured_at;
    results["unique_ids"] = s.ids.size();
    results["snapshot_path"] = out_path;
    report::write_json(report::envelope("ingest", opts.seed,
                                        {{"source_id", source_id}, {"fixture_dir", dir.string()}},
                                        results),
                       rdir);
    report::write_text("ingest: " + std::to_string(s.ids.size()) + " unique ids for '" + candidate +
                           "' -> " + out_path + "\n",
                       rdir);
    std::cout << rdir.string() << "\n";
    return kExitOk;
}

int cmd_snapshot_diff(const CommonOpts& opts, const std::string& older_path,
                      const std::string& newer_path) {
    const snap::Snapshot older = load_snapshot_checked(older_path);
    const snap::Snapshot newer = load_snapshot_checked(newer_path);
    const snap::DiffResult d = snap::diff(older, newer);

    const fs::path rdir = run_dir(opts, "snapshot-diff");
    {
        snap::Snapshot tmp;
        tmp.candidate = older.candidate;
        tmp.captured_at = newer.captured_at;
        tmp.ids = d.new_followers;
        snap::export_csv(tmp, rdir / "new_followers.csv");
        tmp.ids = d.unfollowers;
        snap::export_csv(tmp, rdir / "unfollowers.csv");
    }

    json results;
    results["candidate"] = older.candidate;
    results["older_captured_at"] = older.captured_at;
    results["newer_captured_at"] = newer.captured_at;
    results["older_count"] = older.ids.size();
    results["newer_count"] = newer.ids.size();
    results["new_followers"] = d.new_followers.size();
    results["unfollowers"] = d.unfollowers.size();
    results["net_gain"] = d.net_gain;
    report::write_json(report::envelope("snapshot-diff", opts.seed,
                                        {{"older", older_path}, {"newer", newer_path}}, results),
                       rdir);

    report::write_text(report::format_table({
                           {"candidate", "new_followers", "unfollowers", "net_gain"},
                           {older.candidate, std::to_string(d.new_followers.size()),
                            std::to_string(d.unfollowers.size()), std::to_string(d.net_gain)},
                       }),
                       rdir);
    std::cout << rdir.string() << "\n";
    return kExitOk;
}

int cmd_snapshot_export(const std::string& in_path, const std::string& out_path) {
    snap::export_csv(load_snapshot_checked(in_path), out_path);
    return kExitOk;
}

// Manifest: JSON array of {user_id, image, faces: [[x,y,w,h],...], byte_size?}.
int cmd_preprocess(const CommonOpts& opts, const std::string& manifest_path) {
    require_file(manifest_path, "manifest");
    std::ifstream in(manifest_path);
    json manifest = json::parse(in);
    if (!manifest.is_array()) throw BadInput("manifest must be a JSON array");
    const fs::path base = fs::path(manifest_path).parent_path();

    std::vector<img::RawProfileImage> images;
    images.reserve(manifest.size());
    for (const auto& entry : manifest) {
        img::RawProfileImage raw;
        raw.user_id = entry.at("user_id").get<std::uint64_t>();
        const fs::path image_path = base / entry.at("image").get<std::string>();
        require_file(image_path, "profile image");
        img::PpmImage ppm = img::load_ppm(image_path);
        raw.width = ppm.width;
        raw.height = ppm.height;
        raw.pixels = std::move(ppm.pixels);
        raw.byte_size = entry.contains("byte_size") ? entry["byte_size"].get<std::uint64_t>()
                                                    : fs::file_size(image_path);
        for (const auto& box : entry.value("faces", json::array()))
            raw.faces.push_back({box.at(0).get<int>(), box.at(1).get<int>(), box.at(2).get<int>(),
                                 box.at(3).get<int>()});
        images.push_back(std::move(raw));
    }

    const img::BatchResult batch = img::batch_preprocess(images, opts.min_bytes);
    const fs::path rdir = run_dir(opts, "preprocess");
    img::write_tensor_file(batch.tensors, rdir / "tensors.f32");
    img::write_id_file(batch.tensors, rdir / "tensor_ids.txt");

    json rejections = json::array();
    for (const auto& r : batch.rejections)
        rejections.push_back({{"user_id", r.user_id}, {"reason", img::to_string(r.reason)}});
    json warnings = json::array();
    for (const auto& w : batch.warnings)
        warnings.push_back({{"user_id", w.user_id}, {"aspect_ratio", w.aspect_ratio}});

    json results;
    results["images"] = images.size();
    results["tensors"] = batch.tensors.size();
    results["rejections"] = rejections;
    results["warnings"] = warnings;
    results["min_bytes"] = opts.min_bytes;
    report::write_json(
        report::envelope("preprocess", opts.seed, {{"manifest", manifest_path}}, results), rdir);
    report::write_text("preprocess: " + std::to_string(batch.tensors.size()) + "/" +
                           std::to_string(images.size()) + " images accepted\n",
                       rdir);
    std::cout << rdir.string() << "\n";
    return kExitOk;
}

// Names file: TSV "user_id<TAB>display name".
int cmd_label(const CommonOpts& opts, const std::string& names_path) {
    require_file(names_path, "names file");
    if (opts.lexicon_dir.empty()) throw BadInput("--lexicon-dir is required");
    const weak::NameLexicon lexicon = weak::load_lexicon_dir(opts.lexicon_dir);

    std::ifstream in(names_path);
    std::uint64_t n_male = 0, n_female = 0, n_unknown = 0;
    const fs::path rdir = run_dir(opts, "label");
    std::ofstream out(rdir / "labels.csv", std::ios::trunc);
    out << "user_id,label\n";
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw BadInput("names file: missing tab on line " + std::to_string(line_no));
        const std::uint64_t id = std::stoull(line.substr(0, tab));
        const weak::Label l = weak::label(line.substr(tab + 1), lexicon);
        switch (l) {
            case weak::Label::male: ++n_male; break;
            case weak::Label::female: ++n_female; break;
            case weak::Label::unknown: ++n_unknown; break;
        }
        out << id << ',' << weak::to_string(l) << '\n';
    }
    out.close();

    json results;
    results["male"] = n_male;
    results["female"] = n_female;
    results["unknown"] = n_unknown;
    results["dropped_ambiguous"] = lexicon.dropped_ambiguous;
    report::write_json(report::envelope("label", opts.seed,
                                        {{"names", names_path}, {"lexicon_dir", opts.lexicon_dir}},
                                        results),
                       rdir);
    report::write_text(report::format_table({{"male", "female", "unknown"},
                                             {std::to_string(n_male), std::to_string(n_female),
                                              std::to_string(n_unknown)}}),
                       rdir);
    std::cout << rdir.string() << "\n";
    return kExitOk;
}

struct JoinedSet {
    std::vector<img::FaceTensor> tensors;
    std::vector<Gender> labels;
};

JoinedSet join_tensors_labels(const TensorLibrary& lib,
                              const std::unordered_map<std::uint64_t, Gender>& labels) {
    JoinedSet set;
    for (const auto& t : lib.tensors) {
        auto it = labels.find(t.user_id);
        if (it == labels.end()) continue;
        set.tensors.push_back(t);
        set.labels.push_back(it->second);
    }
    return set;
}

int cmd_train(const CommonOpts& opts, const std::string& tensors_path, const std::string& ids_path,
              const std::string& labels_path, const std::string& model_out, bool balance,
              double lr, int batch_size, int epochs, int c1, int c2) {
    const TensorLibrary lib = load_tensor_library(tensors_path, ids_path);
    const auto label_map = load_label_map(labels_path);
    JoinedSet set = join_tensors_labels(lib, label_map);
    if (set.tensors.empty()) throw BadInput("train: no labeled tensors after the join");

    if (balance) {
        std::vector<weak::LabeledTensor> pairs;
        pairs.reserve(set.tensors.size());
        for (std::size_t i = 0; i < set.tensors.size(); ++i)
            pairs.push_back({set.tensors[i],
                             {set.tensors[i].user_id,
                              set.labels[i] == Gender::male ? weak::Label::male
                                                            : weak::Label::female}});
        const auto balanced = weak::balance(pairs, electorate::derive_seed(opts.seed, 100));
        set.tensors.clear();
        set.labels.clear();
        for (const auto& [tensor, wl] : balanced) {
            set.tensors.push_back(tensor);
            set.labels.push_back(wl.label == weak::Label::male ? Gender::male : Gender::female);
        }
    }

    cnn::TrainConfig config;
    config.learning_rate = lr;
    config.batch_size = batch_size;
    config.epochs = epochs;
    config.seed = opts.seed;
    config.jobs = opts.jobs;
    const cnn::TrainResult trained =
        cnn::train(set.tensors, set.labels, cnn::NetworkShape{c1, c2}, config);
    cnn::save_model(trained.params, model_out);

    const fs::path rdir = run_dir(opts, "train");
    json results;
    results["examples"] = set.tensors.size();
    results["balanced"] = balance;
    results["epoch_losses"] = trained.epoch_losses;
    results["model_path"] = model_out;
    results["shape"] = {{"c1", c1}, {"c2", c2}};
    report::write_json(report::envelope("train", opts.seed,
                                        {{"tensors", tensors_path},
                                         {"ids", ids_path},
                                         {"labels", labels_path},
                                         {"learning_rate", lr},
                                         {"batch_size", batch_size},
                                         {"epochs", epochs}},
                                        results),
                       rdir);
    std::string txt = "train: " + std::to_string(set.tensors.size()) + " examples\n";
    for (std::size_t e = 0; e < trained.epoch_losses.size(); ++e)
        txt += "epoch " + std::to_string(e + 1) + " loss " + fmt(trained.epoch_losses[e]) + "\n";
    report::write_text(txt, rdir);
    std::cout << rdir.string() << "\n";
    return kExitOk;
}

int cmd_evaluate(const CommonOpts& opts, const std::string& tensors_path,
                 const std::string& ids_path, const std::string& labels_path,
                 const std::string& positive) {
    if (opts.model.empty()) throw BadInput("--model is required");
    require_file(opts.model, "model");
    const cnn::NetworkParams params = cnn::load_model(opts.model);
    const TensorLibrary lib = load_tensor_library(tensors_path, ids_path);
    const auto label_map = load_label_map(labels_path);
    const JoinedSet set = join_tensors_labels(lib, label_map);
    if (set.tensors.empty()) throw BadInput("evaluate: no labeled tensors after the join");

    const Gender pos = positive == "female" ? Gender::female : Gender::male;
    const cnn::EvalMetrics m = cnn::evaluate(params, set.tensors, set.labels, pos, opts.jobs);

    const fs::path rdir = run_dir(opts, "evaluate");
    json results;
    results["examples"] = set.tensors.size();
    results["positive_class"] = to_string(pos);
    results["precision"] = m.precision;
    results["recall"] = m.recall;
    results["f1"] = m.f1;
    results["accuracy"] = m.accuracy;
    results["confusion"] = {{"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}, {"tn", m.tn}};
    report::write_json(report::envelope("evaluate", opts.seed,
                                        {{"model", opts.model},
                                         {"tensors", tensors_path},
                                         {"ids", ids_path},
                                         {"labels", labels_path}},
                                        results),
                       rdir);
    report::write_text(report::format_table({{"precision", "recall", "f1", "accuracy"},
                                             {fmt(m.precision), fmt(m.recall), fmt(m.f1),
                                              fmt(m.accuracy)}}),
                       rdir);
    std::cout << rdir.string() << "\n";
    return kExitOk;
}

int cmd_classify(const CommonOpts& opts, const std::string& tensors_path,
                 const std::string& ids_path) {
    if (opts.model.empty()) throw BadInput("--model is required");
    require_file(opts.model, "model");
    const cnn::NetworkParams params = cnn::load_model(opts.model);
    const TensorLibrary lib = load_tensor_library(tensors_path, ids_path);

    const auto probs = cnn::forward(params, lib.tensors, opts.jobs);
    const fs::path rdir = run_dir(opts, "classify");
    std::ofstream out(rdir / "predictions.csv", std::ios::trunc);
    out << "user_id,label,p_male\n";
    std::uint64_t n_male = 0, n_female = 0;
    for (std::size_t i = 0; i < lib.tensors.size(); ++i) {
        const bool male = probs[i][0] >= probs[i][1];
        (male ? n_male : n_female) += 1;
        out << lib.tensors[i].user_id << ',' << (male ? "male" : "female") << ','
            << fmt(probs[i][0], 9) << '\n';
    }
    out.close();

    json results;
    results["classified"] = lib.tensors.size();
    results["male"] = n_male;
    results["female"] = n_female;
    results["predictions_path"] = (rdir / "predictions.csv").string();
    report::write_json(report::envelope("classify", opts.seed,
                                        {{"model", opts.model}, {"tensors", tensors_path}},
                                        results),
                       rdir);
    report::write_text("classify: " + std::to_string(n_male) + " male, " +
                           std::to_string(n_female) + " female\n",
                       rdir);
    std::cout << rdir.string() << "\n";
    return kExitOk;
}

int cmd_event_study(const CommonOpts& base_opts, const std::string& config_path,
                    const std::string& tensors_path, const std::string& ids_path,
                    const std::string& labels_path, const std::string& tested, bool out_given) {
    require_file(config_path, "case-study config");
    std::ifstream in(config_path);
    const json config = json::parse(in);
    const fs::path base = fs::path(config_path).parent_path();

    // The config may carry the model path and output root; flags win.
    CommonOpts opts = base_opts;
    if (!out_given && config.contains("out"))
        opts.out = (base / config["out"].get<std::string>()).string();
    auto path_of = [&base](const json& j, const char* key) {
        return (base / j.at(key).get<std::string>()).string();
    };

    const std::string candidate = config.at("candidate").get<std::string>();
    const std::string event_label = config.value("event_label", std::string("event"));
    const snap::Snapshot before_older = load_snapshot_checked(path_of(config.at("before"), "older"));
    const snap::Snapshot before_newer = load_snapshot_checked(path_of(config.at("before"), "newer"));
    const snap::Snapshot after_older = load_snapshot_checked(path_of(config.at("after"), "older"));
    const snap::Snapshot after_newer = load_snapshot_checked(path_of(config.at("after"), "newer"));
    for (const snap::Snapshot* s : {&before_older, &before_newer, &after_older, &after_newer})
        if (s->candidate != candidate)
            throw BadInput("event-study: snapshot candidate '" + s->candidate +
                           "' does not match config candidate '" + candidate + "'");
    if (before_newer.captured_at > after_older.captured_at)
        throw BadInput("event-study: before-pair must precede after-pair");

    const std::string model_path = !opts.model.empty() ? opts.model
                                                       : config.value("model", std::string());
    TensorLibrary lib;
    const Classifier classifier =
        make_classifier(model_path, tensors_path, ids_path, labels_path, lib);

    const snap::DiffResult before = snap::diff(before_older, before_newer);
    const snap::DiffResult after = snap::diff(after_older, after_newer);

    const Gender tested_class = tested == "female" ? Gender::female : Gender::male;
    const int jobs = opts.jobs;
    const auto comp_new_before =
        classifier.classify_cohort(before.new_followers, "new_followers/before", jobs);
    const auto comp_new_after =
        classifier.classify_cohort(after.new_followers, "new_followers/after", jobs);
    const auto comp_unf_before =
        classifier.classify_cohort(before.unfollowers, "unfollowers/before", jobs);
    const auto comp_unf_after =
        classifier.classify_cohort(after.unfollowers, "unfollowers/after", jobs);

    const auto test_new = safe_two_sample_z(comp_new_before, comp_new_after, tested_class);
    const auto test_unf = safe_two_sample_z(comp_unf_before, comp_unf_after, tested_class);

    const fs::path rdir = run_dir(opts, "event-study");
    {
        std::ofstream counts(rdir / "counts.csv", std::ios::trunc);
        counts << "cohort,period,count\n"
               << "new_followers,before," << before.new_followers.size() << "\n"
               << "new_followers,after," << after.new_followers.size() << "\n"
               << "unfollowers,before," << before.unfollowers.size() << "\n"
               << "unfollowers,after," << after.unfollowers.size() << "\n";
    }

    json results;
    results["candidate"] = candidate;
    results["event_label"] = event_label;
    results["alpha"] = opts.alpha;
    results["tested_class"] = to_string(tested_class);
    results["counts"] = {{"new_followers", {{"before", before.new_followers.size()},
                                            {"after", after.new_followers.size()}}},
                         {"unfollowers", {{"before", before.unfollowers.size()},
                                          {"after", after.unfollowers.size()}}}};
    results["compositions"] = {
        {"new_before", report::to_json(comp_new_before, before.new_followers.size())},
        {"new_after", report::to_json(comp_new_after, after.new_followers.size())},
        {"unf_before", report::to_json(comp_unf_before, before.unfollowers.size())},
        {"unf_after", report::to_json(comp_unf_after, after.unfollowers.size())}};
    results["tests"] = {
        {"new_followers", report::to_json(test_new, "new_followers/before", "new_followers/after")},
        {"unfollowers", report::to_json(test_unf, "unfollowers/before", "unfollowers/after")}};
    report::write_json(report::envelope("event-study", opts.seed, {{"config", config_path}},
                                        results),
                       rdir);

    auto sig = [&opts](const stats::ZTestResult& r) {
        if (r.degenerate) return std::string("degenerate");
        return r.p_value < opts.alpha ? std::string("yes") : std::string("no");
    };
    std::string txt = "Event study: " + event_label + " (candidate " + candidate + ", tested class " +
                      to_string(tested_class) + ")\n\n";
    txt += report::format_table({{"cohort", "before", "after"},
                                 {"new_followers", std::to_string(before.new_followers.size()),
                                  std::to_string(after.new_followers.size())},
                                 {"unfollowers", std::to_string(before.unfollowers.size()),
                                  std::to_string(after.unfollowers.size())}});
    txt += "\n";
    txt += report::format_table(
        {{"test", "n1", "p1", "n2", "p2", "z", "p value", "significant"},
         {"new_followers", std::to_string(test_new.n1), fmt(test_new.p1, 4),
          std::to_string(test_new.n2), fmt(test_new.p2, 4), fmt(test_new.z, 5),
          fmt(test_new.p_value, 4), sig(test_new)},
         {"unfollowers", std::to_string(test_unf.n1), fmt(test_unf.p1, 4),
          std::to_string(test_unf.n2), fmt(test_unf.p2, 4), fmt(test_unf.z, 5),
          fmt(test_unf.p_value, 4), sig(test_unf)}});
    report::write_text(txt, rdir);
    std::cout << rdir.string() << "\n";
    return kExitOk;
}

int cmd_crossfollow(const CommonOpts& opts, const std::string& focal_path, const std::string& a_path,
                    const std::string& b_path, const std::string& a_label,
                    const std::string& b_label, const std::string& tensors_path,
                    const std::string& ids_path, const std::string& labels_path,
                    const std::string& tested) {
    const snap::Snapshot focal = load_snapshot_checked(focal_path);
    const snap::Snapshot a = load_snapshot_checked(a_path);
    const snap::Snapshot b = load_snapshot_checked(b_path);
    const audience::GroupPartition part = audience::partition_groups(focal, a, b);

    const bool classify =
        !labels_path.empty() || !(opts.model.empty() && tensors_path.empty() && ids_path.empty());
    TensorLibrary lib;
    std::optional<Classifier> classifier;
    if (classify)
        classifier = make_classifier(opts.model, tensors_path, ids_path, labels_path, lib);

    struct Group {
        std::string name;
        const std::vector<snap::UserId>* ids;
    };
    const Group groups[4] = {{a_label + "_only", &part.a_only},
                             {b_label + "_only", &part.b_only},
                             {"both", &part.both},
                             {"focal_only", &part.focal_only}};
    const double focal_total = static_cast<double>(focal.ids.size());
    const Gender tested_class = tested == "female" ? Gender::female : Gender::male;

    json group_rows = json::array();
    std::vector<std::vector<std::string>> table = {{"group", "count", "share", "male", "female",
                                                    "z vs rest", "p value"}};
    for (const Group& g : groups) {
        json row;
        row["group"] = g.name;
        row["count"] = g.ids->size();
        row["share"] = focal_total > 0 ? static_cast<double>(g.ids->size()) / focal_total : 0.0;
        std::string ztxt = "-", ptxt = "-", male = "-", female = "-";
        if (classifier) {
            const auto comp = classifier->classify_cohort(*g.ids, g.name, opts.jobs);
            row["composition"] = report::to_json(comp, g.ids->size());
            // Rest-of-focal is disjoint from the group, so the two samples
            // are independent.
            std::vector<snap::UserId> rest;
            rest.reserve(focal.ids.size() - g.ids->size());
            std::size_t gi = 0;
            for (snap::UserId id : focal.ids) {
                if (gi < g.ids->size() && (*g.ids)[gi] == id) {
                    ++gi;
                    continue;
                }
                rest.push_back(id);
            }
            const auto comp_rest = classifier->classify_cohort(rest, g.name + "/rest", opts.jobs);
            const auto t = safe_two_sample_z(comp_rest, comp, tested_class);
            row["z_vs_rest"] = report::to_json(t, g.name + "/rest", g.name);
            ztxt = t.degenerate ? "degenerate" : fmt(t.z, 5);
            ptxt = t.degenerate ? "-" : fmt(t.p_value, 4);
            male = std::to_string(comp.male_count);
            female = std::to_string(comp.female_count);
        }
        table.push_back({g.name, std::to_string(g.ids->size()),
                         fmt(row["share"].get<double>(), 4), male, female, ztxt, ptxt});
        group_rows.push_back(std::move(row));
    }

    const fs::path rdir = run_dir(opts, "crossfollow");
    {
        std::ofstream csv(rdir / "groups.csv", std::ios::trunc);
        csv << "group,count,share\n";
        for (const Group& g : groups)
            csv << g.name << ',' << g.ids->size() << ','
                << fmt(focal_total > 0 ? g.ids->size() / focal_total : 0.0, 6) << "\n";
    }

    json results;
    results["focal_count"] = focal.ids.size();
    results["tested_class"] = to_string(tested_class);
    results["groups"] = group_rows;
    report::write_json(report::envelope("crossfollow", opts.seed,
                                        {{"focal", focal_path}, {"a", a_path}, {"b", b_path}},
                                        results),
                       rdir);
    report::write_text(report::format_table(table), rdir);
    std::cout << rdir.string() << "\n";
    return kExitOk;
}

// Cohort file: one decimal id per line (the format snapshot-diff emits).
int cmd_destinations(const CommonOpts& opts, const std::string& cohort_path,
                     const std::vector<std::string>& dest_specs) {
    require_file(cohort_path, "cohort file");
    std::vector<snap::UserId> cohort = img::read_id_file(cohort_path);
    std::sort(cohort.begin(), cohort.end());
    cohort.erase(std::unique(cohort.begin(), cohort.end()), cohort.end());

    std::vector<snap::Snapshot> snapshots;
    std::vector<std::string> names;
    snapshots.reserve(dest_specs.size());
    for (const std::string& spec : dest_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw BadInput("--dest expects name=snapshot-path, got '" + spec + "'");
        names.push_back(spec.substr(0, eq));
        snapshots.push_back(load_snapshot_checked(spec.substr(eq + 1)));
    }
    std::vector<audience::NamedSnapshot> dests;
    for (std::size_t i = 0; i < names.size(); ++i) dests.push_back({names[i], &snapshots[i]});
    const auto rates = audience::destination_rates(cohort, dests);

    const fs::path rdir = run_dir(opts, "destinations");
    json rows = json::array();
    std::vector<std::vector<std::string>> table = {{"destination", "overlap", "rate"}};
    {
        std::ofstream csv(rdir / "rates.csv", std::ios::trunc);
        csv << "destination,overlap,rate\n";
        for (const auto& r : rates) {
            rows.push_back(
                {{"destination", r.destination}, {"overlap", r.overlap}, {"rate", r.rate}});
            table.push_back({r.destination, std::to_string(r.overlap), fmt(r.rate, 6)});
            csv << r.destination << ',' << r.overlap << ',' << fmt(r.rate, 6) << "\n";
        }
    }

    json results;
    results["cohort_size"] = cohort.size();
    results["rates"] = rows;
    report::write_json(report::envelope("destinations", opts.seed, {{"cohort", cohort_path}},
                                        results),
                       rdir);
    report::write_text(report::format_table(table), rdir);
    std::cout << rdir.string() << "\n";
    return kExitOk;
}

int cmd_simulate(const CommonOpts& opts, const std::string& params_path, std::uint64_t trials) {
    require_file(params_path, "params config");
    const affinity::AffinityParams params = affinity::load_params(params_path);
    if (trials == 0) throw BadInput("--trials must be >= 1");

    struct Trial {
        double z = 0.0;
        double p = 1.0;
        bool reject = false;
        bool degenerate = false;
    };
    std::vector<Trial> trial_results(trials);

    electorate::parallel_for_chunks(trials, opts.jobs, [&](std::size_t t) {
        const auto before =
            affinity::simulate(params, false, electorate::derive_seed(opts.seed, 2 * t), 1);
        const auto after =
            affinity::simulate(params, true, electorate::derive_seed(opts.seed, 2 * t + 1), 1);
        stats::GenderComposition cb{before.followed_m, before.followed_w, "before"};
        stats::GenderComposition ca{after.followed_m, after.followed_w, "after"};
        Trial& out = trial_results[t];
        if (cb.total() == 0 || ca.total() == 0) {
            out.degenerate = true;
            return;
        }
        const auto r = stats::two_sample_z(cb, ca, Gender::male);
        out.degenerate = r.degenerate;
        if (!r.degenerate) {
            out.z = r.z;
            out.p = r.p_value;
            out.reject = r.p_value < opts.alpha;
        }
    });

    std::uint64_t rejections = 0, degenerate = 0;
    for (const Trial& t : trial_results) {
        rejections += t.reject ? 1 : 0;
        degenerate += t.degenerate ? 1 : 0;
    }
    const double rate = static_cast<double>(rejections) / static_cast<double>(trials);

    const fs::path rdir = run_dir(opts, "simulate");
    {
        std::ofstream csv(rdir / "trials.csv", std::ios::trunc);
        csv << "trial,z,p_value,reject\n";
        for (std::size_t t = 0; t < trials; ++t)
            csv << t << ',' << fmt(trial_results[t].z, 9) << ',' << fmt(trial_results[t].p, 9)
                << ',' << (trial_results[t].reject ? 1 : 0) << "\n";
    }

    json results;
    results["trials"] = trials;
    results["alpha"] = opts.alpha;
    results["rejections"] = rejections;
    results["rejection_rate"] = rate;
    results["degenerate_trials"] = degenerate;
    results["disturbance"] = affinity::disturbance(params);
    results["gender_ratio_before"] = affinity::gender_ratio(params, false);
    results["gender_ratio_after"] = affinity::gender_ratio(params, true);
    results["params"] = {{"baseline_m", params.baseline_m}, {"baseline_w", params.baseline_w},
                         {"lambda_m", params.lambda_m},     {"lambda_w", params.lambda_w},
                         {"n_prime_m", params.n_prime_m},   {"n_prime_w", params.n_prime_w},
                         {"n_dprime_m", params.n_dprime_m}, {"n_dprime_w", params.n_dprime_w}};
    report::write_json(report::envelope("simulate", opts.seed, {{"params", params_path}}, results),
                       rdir);
    report::write_text(report::format_table(
                           {{"trials", "alpha", "rejection_rate", "disturbance"},
                            {std::to_string(trials), fmt(opts.alpha), fmt(rate),
                             fmt(results["disturbance"].get<double>())}}),
                       rdir);
    std::cout << rdir.string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"electorate: follower-dynamics analytics"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOpts opts;
    auto* out_opt = app.add_option("--out", opts.out, "Report output root");
    out_opt->capture_default_str();
    app.add_option("--stamp", opts.stamp, "Run directory name (default: current UTC time)");
    app.add_option("--seed", opts.seed, "Seed for all randomness")->capture_default_str();
    app.add_option("--jobs", opts.jobs, "Worker threads (0 = logical cores)")->capture_default_str();
    app.add_option("--alpha", opts.alpha, "Significance level")->capture_default_str();
    app.add_option("--min-bytes", opts.min_bytes, "Minimum original image size")
        ->capture_default_str();
    app.add_option("--model", opts.model, "Classifier model path");
    app.add_option("--lexicon-dir", opts.lexicon_dir, "Directory with male_names.txt/female_names.txt");

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "Fetch follower ids into a snapshot");
    std::string source_id, fixture_dir, candidate, out_path;
    std::int64_t captured_at = 0;
    std::uint32_t rate_limit = 0;
    ingest_cmd->add_option("--source-id", source_id)->required();
    ingest_cmd->add_option("--fixture-dir", fixture_dir, "Default: $ELECTORATE_FIXTURE_DIR");
    ingest_cmd->add_option("--candidate", candidate)->required();
    ingest_cmd->add_option("--captured-at", captured_at, "UTC epoch seconds")->required();
    ingest_cmd->add_option("--rate-limit", rate_limit, "Requests per rolling minute, 0 = unlimited");
    ingest_cmd->add_option("-o,--snapshot-out", out_path)->required();

    // snapshot diff / export-csv
    auto* snapshot_cmd = app.add_subcommand("snapshot", "Snapshot operations");
    snapshot_cmd->require_subcommand(1);
    snapshot_cmd->fallthrough();
    auto* diff_cmd = snapshot_cmd->add_subcommand("diff", "Diff two snapshots of one candidate");
    diff_cmd->fallthrough();
    std::string older_path, newer_path;
    diff_cmd->add_option("--older", older_path)->required();
    diff_cmd->add_option("--newer", newer_path)->required();
    auto* export_cmd = snapshot_cmd->add_subcommand("export-csv", "Write ids as CSV");
    export_cmd->fallthrough();
    std::string export_in, export_out;
    export_cmd->add_option("--in", export_in)->required();
    export_cmd->add_option("--csv-out", export_out)->required();

    // preprocess
    auto* preprocess_cmd = app.add_subcommand("preprocess", "Images + face boxes -> tensors");
    std::string manifest_path;
    preprocess_cmd->add_option("--manifest", manifest_path)->required();

    // label
    auto* label_cmd = app.add_subcommand("label", "Weak labels from display names");
    std::string names_path;
    label_cmd->add_option("--names", names_path, "TSV: user_id<TAB>display name")->required();

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the gender classifier");
    std::string train_tensors, train_ids, train_labels, model_out;
    bool no_balance = false;
    double lr = 0.05;
    int batch_size = 64, epochs = 10, c1 = 8, c2 = 16;
    train_cmd->add_option("--tensors", train_tensors)->required();
    train_cmd->add_option("--ids", train_ids)->required();
    train_cmd->add_option("--labels", train_labels)->required();
    train_cmd->add_option("--model-out", model_out)->required();
    train_cmd->add_flag("--no-balance", no_balance, "Skip 1:1 class balancing");
    train_cmd->add_option("--lr", lr)->capture_default_str();
    train_cmd->add_option("--batch", batch_size)->capture_default_str();
    train_cmd->add_option("--epochs", epochs)->capture_default_str();
    train_cmd->add_option("--c1", c1, "conv1 channels")->capture_default_str();
    train_cmd->add_option("--c2", c2, "conv2 channels")->capture_default_str();

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Metrics on a labeled set");
    std::string eval_tensors, eval_ids, eval_labels, positive = "male";
    eval_cmd->add_option("--tensors", eval_tensors)->required();
    eval_cmd->add_option("--ids", eval_ids)->required();
    eval_cmd->add_option("--labels", eval_labels)->required();
    eval_cmd->add_option("--positive", positive, "Positive class for precision/recall")
        ->capture_default_str();

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "Predict labels for a tensor file");
    std::string cls_tensors, cls_ids;
    classify_cmd->add_option("--tensors", cls_tensors)->required();
    classify_cmd->add_option("--ids", cls_ids)->required();

    // event-study
    auto* event_cmd = app.add_subcommand("event-study", "Before/after gender-shift tests");
    std::string event_config, event_tensors, event_ids, event_labels, tested = "male";
    event_cmd->add_option("--config", event_config)->required();
    event_cmd->add_option("--tensors", event_tensors);
    event_cmd->add_option("--ids", event_ids);
    event_cmd->add_option("--labels", event_labels, "Precomputed predictions CSV");
    event_cmd->add_option("--tested-class", tested)->capture_default_str();

    // crossfollow
    auto* cross_cmd = app.add_subcommand("crossfollow", "Four-group partition report");
    std::string focal_path, a_path, b_path, a_label = "a", b_label = "b";
    std::string cross_tensors, cross_ids, cross_labels, cross_tested = "male";
    cross_cmd->add_option("--focal", focal_path)->required();
    cross_cmd->add_option("--a", a_path)->required();
    cross_cmd->add_option("--b", b_path)->required();
    cross_cmd->add_option("--a-label", a_label)->capture_default_str();
    cross_cmd->add_option("--b-label", b_label)->capture_default_str();
    cross_cmd->add_option("--tensors", cross_tensors);
    cross_cmd->add_option("--ids", cross_ids);
    cross_cmd->add_option("--labels", cross_labels, "Precomputed predictions CSV");
    cross_cmd->add_option("--tested-class", cross_tested)->capture_default_str();

    // destinations
    auto* dest_cmd = app.add_subcommand("destinations", "Cohort overlap rates per snapshot");
    std::string cohort_path;
    std::vector<std::string> dest_specs;
    dest_cmd->add_option("--cohort", cohort_path, "ID list, one per line")->required();
    dest_cmd->add_option("--dest", dest_specs, "name=snapshot-path (repeatable)")->required();

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Seeded model simulations + calibration");
    std::string params_path;
    std::uint64_t trials = 100;
    sim_cmd->add_option("--params", params_path)->required();
    sim_cmd->add_option("--trials", trials)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadInput;
    }

    try {
        if (*ingest_cmd)
            return cmd_ingest(opts, source_id, fixture_dir, candidate, captured_at, rate_limit,
                              out_path);
        if (*diff_cmd) return cmd_snapshot_diff(opts, older_path, newer_path);
        if (*export_cmd) return cmd_snapshot_export(export_in, export_out);
        if (*preprocess_cmd) return cmd_preprocess(opts, manifest_path);
        if (*label_cmd) return cmd_label(opts, names_path);
        if (*train_cmd)
            return cmd_train(opts, train_tensors, train_ids, train_labels, model_out, !no_balance,
                             lr, batch_size, epochs, c1, c2);
        if (*eval_cmd) return cmd_evaluate(opts, eval_tensors, eval_ids, eval_labels, positive);
        if (*classify_cmd) return cmd_classify(opts, cls_tensors, cls_ids);
        if (*event_cmd)
            return cmd_event_study(opts, event_config, event_tensors, event_ids, event_labels,
                                   tested, out_opt->count() > 0);
        if (*cross_cmd)
            return cmd_crossfollow(opts, focal_path, a_path, b_path, a_label, b_label,
                                   cross_tensors, cross_ids, cross_labels, cross_tested);
        if (*dest_cmd) return cmd_destinations(opts, cohort_path, dest_specs);
        if (*sim_cmd) return cmd_simulate(opts, params_path, trials);
        std::cerr << "error: no subcommand\n";
        return kExitBadInput;
    } catch (const BadInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
