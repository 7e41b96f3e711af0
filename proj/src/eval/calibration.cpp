#include "taskchain/eval/calibration.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "taskchain/core/errors.hpp"

namespace taskchain {

using Key = std::pair<std::string, int>;

LabelFile read_label_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open label file '" + path.string() + "'");
    LabelFile out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path.filename().string() + ":" + std::to_string(lineno);
        try {
            auto j = nlohmann::json::parse(line);
            LabelEntry e;
            e.sequence_id = j.at("sequence_id").get<std::string>();
            e.level = j.at("level").get<int>();
            e.human_success = j.at("human_success").get<bool>();
            e.human_completion = j.at("human_completion").get<double>();
            if (!(e.human_completion >= 0.0 && e.human_completion <= 1.0))
                throw DecodeError(where + ": human_completion must be in [0, 1]");
            out.push_back(std::move(e));
        } catch (const nlohmann::json::exception& e) {
            throw DecodeError(where + ": " + e.what());
        }
    }
    return out;
}

double cohen_kappa(const std::vector<bool>& a, const std::vector<bool>& b) {
    if (a.empty() || a.size() != b.size()) throw PreconditionViolation("kappa needs two equal, non-empty label lists");
    const double n = static_cast<double>(a.size());
    double agree = 0, a1 = 0, b1 = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        agree += a[i] == b[i] ? 1 : 0;
        a1 += a[i] ? 1 : 0;
        b1 += b[i] ? 1 : 0;
    }
    const double po = agree / n;
    const double pe = (a1 / n) * (b1 / n) + (1 - a1 / n) * (1 - b1 / n);
    if (pe >= 1.0) return 1.0;
    return (po - pe) / (1 - pe);
}

namespace {

template <class T, class KeyFn>
std::map<Key, const T*> index_unique(const std::vector<T>& items, KeyFn key, const char* what) {
    std::map<Key, const T*> out;
    for (const auto& it : items) {
        Key k = key(it);
        if (!out.emplace(k, &it).second)
            throw JoinMismatch(std::string("duplicate ") + what + " for " + k.first + " level " + std::to_string(k.second));
    }
    return out;
}

void require_same_keys(const std::map<Key, const void*>& a, const std::map<Key, const void*>& b, const char* what) {
    for (const auto& [k, _] : a)
        if (!b.count(k)) throw JoinMismatch(std::string(what) + " missing " + k.first + " level " + std::to_string(k.second));
    for (const auto& [k, _] : b)
        if (!a.count(k)) throw JoinMismatch(std::string(what) + " has extra " + k.first + " level " + std::to_string(k.second));
}

template <class T>
std::map<Key, const void*> erase_type(const std::map<Key, const T*>& m) {
    return {m.begin(), m.end()};
}

}  // namespace

CalibrationReport calibrate(const std::vector<JudgedTask>& verdicts, const LabelFile& labels,
                            const std::optional<LabelFile>& second_rater) {
    auto label_key = [](const LabelEntry& e) { return Key{e.sequence_id, e.level}; };
    auto vmap = index_unique(verdicts, [](const JudgedTask& t) { return Key{t.sequence_id, t.level}; }, "verdict");
    auto lmap = index_unique(labels, label_key, "label");
    require_same_keys(erase_type(vmap), erase_type(lmap), "labels");

    CalibrationReport r;
    for (int b = 0; b <= 10; ++b) r.bins.push_back({b * 10, b == 10 ? 100 : b * 10 + 9, 0, std::nullopt});
    std::vector<double> bin_sum(11, 0.0);
    int agree = 0;
    for (const auto& [k, v] : vmap) {
        const LabelEntry& l = *lmap.at(k);
        auto& lvl = r.per_level[k.second];
        ++lvl.n;
        const bool same = v->verdict.success == l.human_success;
        lvl.agree += same ? 1 : 0;
        agree += same ? 1 : 0;
        const int pct = std::clamp(v->verdict.completion_pct, 0, 100);
        const int b = pct == 100 ? 10 : pct / 10;
        ++r.bins[b].n;
        bin_sum[b] += l.human_completion;
    }
    for (auto& [_, lvl] : r.per_level) lvl.accuracy = static_cast<double>(lvl.agree) / lvl.n;
    r.overall_accuracy = vmap.empty() ? 0.0 : static_cast<double>(agree) / static_cast<double>(vmap.size());
    for (std::size_t b = 0; b < r.bins.size(); ++b)
        if (r.bins[b].n > 0) r.bins[b].mean_human_completion = bin_sum[b] / r.bins[b].n;

    if (second_rater) {
        auto smap = index_unique(*second_rater, label_key, "second-rater label");
        require_same_keys(erase_type(lmap), erase_type(smap), "second rater");
        std::vector<bool> a, b;
        for (const auto& [k, l] : lmap) {
            a.push_back(l->human_success);
            b.push_back(smap.at(k)->human_success);
        }
        if (!a.empty()) r.cohen_kappa = cohen_kappa(a, b);
    }
    return r;
}

void to_json(nlohmann::json& j, const CalibrationReport& r) {
    nlohmann::json levels = nlohmann::json::object();
    for (const auto& [lvl, a] : r.per_level)
        levels[std::to_string(lvl)] = {{"n", a.n}, {"agree", a.agree}, {"accuracy", a.accuracy}};
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : r.bins) {
        nlohmann::json x = {{"lo", b.lo}, {"hi", b.hi}, {"n", b.n}, {"mean_human_completion", nullptr}};
        if (b.mean_human_completion) x["mean_human_completion"] = *b.mean_human_completion;
        bins.push_back(x);
    }
    j = {{"schema_version", 1},
         {"per_level", levels},
         {"overall_accuracy", r.overall_accuracy},
         {"bins", bins},
         {"cohen_kappa", nullptr}};
    if (r.cohen_kappa) j["cohen_kappa"] = *r.cohen_kappa;
}

std::string format_calibration_table(const CalibrationReport& r) {
    std::string out = "Level      N   Agree  Accuracy\n";
    char buf[128];
    for (const auto& [lvl, a] : r.per_level) {
        std::snprintf(buf, sizeof buf, "%-6d %5d %7d %8.1f%%\n", lvl, a.n, a.agree, 100.0 * a.accuracy);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "overall accuracy %.1f%%\n", 100.0 * r.overall_accuracy);
    out += buf;
    out += "\nJudge completion   N   Human completion\n";
    for (const auto& b : r.bins) {
        if (b.mean_human_completion)
            std::snprintf(buf, sizeof buf, "%3d-%-3d %11d %14.2f\n", b.lo, b.hi, b.n, *b.mean_human_completion);
        else
            std::snprintf(buf, sizeof buf, "%3d-%-3d %11d %14s\n", b.lo, b.hi, b.n, "-");
        out += buf;
    }
    if (r.cohen_kappa) {
        std::snprintf(buf, sizeof buf, "\ninter-rater kappa %.3f\n", *r.cohen_kappa);
        out += buf;
    }
    return out;
}

}  // namespace taskchain
