#include "flare/metrics.hpp"

#include "flare/errors.hpp"
#include "flare/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace flare {

ConfusionMatrix confusion(const std::vector<DecisionValue>& predicted,
                          const std::vector<DecisionValue>& actual) {
    if (predicted.size() != actual.size()) throw LengthMismatch(predicted.size(), actual.size());
    if (predicted.empty()) throw EmptyInput("prediction list");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool actual_pos = actual[i] == DecisionValue::Stay;
        const bool predicted_pos = predicted[i] == DecisionValue::Stay;
        if (actual_pos && predicted_pos) ++m.tp;
        else if (!actual_pos && !predicted_pos) ++m.tn;
        else if (!actual_pos && predicted_pos) ++m.fp;
        else ++m.fn;
    }
    return m;
}

namespace {

double ratio(std::size_t numerator, std::size_t denominator) {
    return denominator == 0 ? 0.0
                            : static_cast<double>(numerator) / static_cast<double>(denominator);
}

double f1_of(double precision, double recall) {
    const double sum = precision + recall;
    return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

}  // namespace

MetricsReport metrics_from_confusion(const ConfusionMatrix& m) {
    if (m.total() == 0) throw EmptyInput("confusion matrix");
    MetricsReport report;
    report.stay.precision = ratio(m.tp, m.tp + m.fp);
    report.stay.recall = ratio(m.tp, m.tp + m.fn);
    report.stay.f1 = f1_of(report.stay.precision, report.stay.recall);
    // The negative class's precision/recall mirror the positive class's with
    // the roles of tp/tn and fp/fn swapped.
    report.evacuate.precision = ratio(m.tn, m.tn + m.fn);
    report.evacuate.recall = ratio(m.tn, m.tn + m.fp);
    report.evacuate.f1 = f1_of(report.evacuate.precision, report.evacuate.recall);
    report.accuracy = ratio(m.tp + m.tn, m.total());
    report.macro_f1 = (report.stay.f1 + report.evacuate.f1) / 2.0;
    report.weighted_f1 = (static_cast<double>(m.n_pos()) * report.stay.f1 +
                          static_cast<double>(m.n_neg()) * report.evacuate.f1) /
                         static_cast<double>(m.total());
    return report;
}

MetricsReport compute_metrics(const std::vector<DecisionValue>& predicted,
                              const std::vector<DecisionValue>& actual) {
    return metrics_from_confusion(confusion(predicted, actual));
}

double compute_mse(const std::vector<double>& predicted, const std::vector<double>& actual) {
    if (predicted.size() != actual.size()) throw LengthMismatch(predicted.size(), actual.size());
    if (predicted.empty()) throw EmptyInput("score list");
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = predicted[i] - actual[i];
        sum += d * d;
    }
    return sum / static_cast<double>(predicted.size());
}

std::array<std::array<double, 5>, 5> ScoreConfusion::normalized() const {
    std::array<std::array<double, 5>, 5> rows{};
    for (std::size_t r = 0; r < 5; ++r) {
        std::size_t total = 0;
        for (std::size_t c = 0; c < 5; ++c) total += counts[r][c];
        if (total == 0) continue;
        for (std::size_t c = 0; c < 5; ++c)
            rows[r][c] = static_cast<double>(counts[r][c]) / static_cast<double>(total);
    }
    return rows;
}

ScoreConfusion score_confusion(const std::vector<int>& predicted, const std::vector<int>& actual) {
    if (predicted.size() != actual.size()) throw LengthMismatch(predicted.size(), actual.size());
    ScoreConfusion confusion;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] < 1 || predicted[i] > 5) throw OutOfRangeScore(predicted[i]);
        if (actual[i] < 1 || actual[i] > 5) throw OutOfRangeScore(actual[i]);
        ++confusion.counts[static_cast<std::size_t>(actual[i] - 1)]
                          [static_cast<std::size_t>(predicted[i] - 1)];
    }
    return confusion;
}

std::string score_confusion_csv(const ScoreConfusion& confusion, bool normalized) {
    std::string out = "actual\\predicted,1,2,3,4,5\n";
    const auto norm = confusion.normalized();
    for (std::size_t r = 0; r < 5; ++r) {
        out += std::to_string(r + 1);
        for (std::size_t c = 0; c < 5; ++c) {
            out.push_back(',');
            out += normalized ? util::format_fixed(norm[r][c], 4)
                              : std::to_string(confusion.counts[r][c]);
        }
        out.push_back('\n');
    }
    return out;
}

std::string score_confusion_svg(const ScoreConfusion& confusion, const std::string& title) {
    const auto norm = confusion.normalized();
    const int cell = 48;
    const int left = 70;
    const int top = 50;
    const int width = left + 5 * cell + 20;
    const int height = top + 5 * cell + 40;
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(width) + "\" height=\"" + std::to_string(height) + "\">\n";
    svg += "<text x=\"" + std::to_string(left) + "\" y=\"20\" font-size=\"14\">" + title +
           "</text>\n";
    for (std::size_t r = 0; r < 5; ++r) {
        for (std::size_t c = 0; c < 5; ++c) {
            const double v = norm[r][c];
            const int shade = static_cast<int>(255.0 * (1.0 - v));
            const int x = left + static_cast<int>(c) * cell;
            const int y = top + static_cast<int>(r) * cell;
            svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) +
                   "\" width=\"" + std::to_string(cell) + "\" height=\"" + std::to_string(cell) +
                   "\" fill=\"rgb(" + std::to_string(shade) + "," + std::to_string(shade) +
                   ",255)\" stroke=\"#888\"/>\n";
            svg += "<text x=\"" + std::to_string(x + cell / 2) + "\" y=\"" +
                   std::to_string(y + cell / 2 + 4) +
                   "\" font-size=\"11\" text-anchor=\"middle\">" + util::format_fixed(v, 2) +
                   "</text>\n";
        }
    }
    for (std::size_t i = 0; i < 5; ++i) {
        svg += "<text x=\"" + std::to_string(left + static_cast<int>(i) * cell + cell / 2) +
               "\" y=\"" + std::to_string(top + 5 * cell + 18) +
               "\" font-size=\"12\" text-anchor=\"middle\">" + std::to_string(i + 1) +
               "</text>\n";
        svg += "<text x=\"" + std::to_string(left - 14) + "\" y=\"" +
               std::to_string(top + static_cast<int>(i) * cell + cell / 2 + 4) +
               "\" font-size=\"12\" text-anchor=\"middle\">" + std::to_string(i + 1) +
               "</text>\n";
    }
    svg += "<text x=\"" + std::to_string(left + 5 * cell / 2) + "\" y=\"" +
           std::to_string(top + 5 * cell + 34) +
           "\" font-size=\"12\" text-anchor=\"middle\">predicted</text>\n";
    svg += "</svg>\n";
    return svg;
}

std::string metrics_to_json(const MetricsReport& report) {
    nlohmann::json doc = {
        {"stay",
         {{"precision", report.stay.precision},
          {"recall", report.stay.recall},
          {"f1", report.stay.f1}}},
        {"evacuate",
         {{"precision", report.evacuate.precision},
          {"recall", report.evacuate.recall},
          {"f1", report.evacuate.f1}}},
        {"accuracy", report.accuracy},
        {"macro_f1", report.macro_f1},
        {"weighted_f1", report.weighted_f1},
    };
    if (report.mse) doc["mse"] = *report.mse;
    return doc.dump(2) + "\n";
}

MetricsReport metrics_from_json(const std::string& text) {
    try {
        const nlohmann::json doc = nlohmann::json::parse(text);
        MetricsReport report;
        report.stay.precision = doc.at("stay").at("precision").get<double>();
        report.stay.recall = doc.at("stay").at("recall").get<double>();
        report.stay.f1 = doc.at("stay").at("f1").get<double>();
        report.evacuate.precision = doc.at("evacuate").at("precision").get<double>();
        report.evacuate.recall = doc.at("evacuate").at("recall").get<double>();
        report.evacuate.f1 = doc.at("evacuate").at("f1").get<double>();
        report.accuracy = doc.at("accuracy").get<double>();
        report.macro_f1 = doc.at("macro_f1").get<double>();
        report.weighted_f1 = doc.at("weighted_f1").get<double>();
        if (doc.contains("mse")) report.mse = doc.at("mse").get<double>();
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("metrics file: ") + e.what());
    }
}

std::string render_report_table(const std::vector<ReportRow>& rows) {
    const std::vector<std::string> headers = {"Method",   "Class",    "Precision",
                                              "Recall",   "F1",       "Accuracy",
                                              "Macro F1", "Weighted F1"};
    std::vector<std::vector<std::string>> cells;
    for (const ReportRow& row : rows) {
        const MetricsReport& m = row.metrics;
        cells.push_back({row.method, "Stay", util::format_fixed(m.stay.precision, 3),
                         util::format_fixed(m.stay.recall, 3), util::format_fixed(m.stay.f1, 3),
                         util::format_fixed(m.accuracy, 3), util::format_fixed(m.macro_f1, 3),
                         util::format_fixed(m.weighted_f1, 3)});
        cells.push_back({row.method, "Evacuate", util::format_fixed(m.evacuate.precision, 3),
                         util::format_fixed(m.evacuate.recall, 3),
                         util::format_fixed(m.evacuate.f1, 3), util::format_fixed(m.accuracy, 3),
                         util::format_fixed(m.macro_f1, 3),
                         util::format_fixed(m.weighted_f1, 3)});
    }

    std::vector<std::size_t> widths(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c) widths[c] = headers[c].size();
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
    }

    auto emit_row = [&](const std::vector<std::string>& row) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) line += "  ";
            line += row[c];
            line.append(widths[c] - row[c].size(), ' ');
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        return line + "\n";
    };

    std::string out = emit_row(headers);
    std::string rule;
    for (std::size_t c = 0; c < widths.size(); ++c) {
        if (c > 0) rule += "  ";
        rule.append(widths[c], '-');
    }
    out += rule + "\n";
    for (const auto& row : cells) out += emit_row(row);
    return out;
}

}  // namespace flare
