#include "awa/corpus_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "awa/errors.hpp"

namespace awa {

namespace fs = std::filesystem;

FixedTrace parse_trace_line(const std::string& line, const std::string& format,
                            int trace_length) {
    std::istringstream iss(line);
    if (format == "ds") {
        DirectionSequence ds;
        int v = 0;
        while (iss >> v) ds.dirs.push_back(v);
        return to_fixed(ds_to_bs(ds), trace_length);
    }
    if (format == "bs") {
        // Accept real values: transformed training-phase corpora are not
        // integer-valued. Trailing zeros are padding.
        std::vector<double> vals;
        double v = 0.0;
        while (iss >> v) vals.push_back(v);
        if (vals.empty()) throw InvalidTrace("empty burst line");
        bool integral = true;
        for (double x : vals)
            if (x != std::floor(x)) { integral = false; break; }
        if (integral) {
            BurstSequence bs;
            for (double x : vals) bs.bursts.push_back(static_cast<int64_t>(x));
            return to_fixed(bs, trace_length);
        }
        FixedTrace out;
        out.values.assign(static_cast<size_t>(trace_length), 0.0);
        int m = std::min<int>(static_cast<int>(vals.size()), trace_length);
        int count = 0;
        for (int i = 0; i < m; ++i) {
            out.values[static_cast<size_t>(i)] = vals[static_cast<size_t>(i)];
            if (vals[static_cast<size_t>(i)] != 0.0) count = i + 1;
        }
        out.original_burst_count = count;
        return out;
    }
    throw IoError("unknown trace format '" + format + "'");
}

TraceCorpus load_corpus(const fs::path& dir, int trace_length) {
    if (!fs::is_directory(dir)) throw IoError("corpus directory not found: " + dir.string());

    TraceCorpus corpus;
    int cls = 0;
    for (;; ++cls) {
        fs::path file = dir / ("class_" + std::to_string(cls) + ".txt");
        if (!fs::exists(file)) break;
        std::ifstream in(file);
        if (!in) throw IoError("cannot open " + file.string());

        std::string header;
        std::getline(in, header);
        std::string format;
        if (header.rfind("format:", 0) == 0) {
            format = header.substr(7);
            size_t start = format.find_first_not_of(" \t");
            format = start == std::string::npos ? "" : format.substr(start);
            size_t end = format.find_last_not_of(" \t\r");
            if (end != std::string::npos) format = format.substr(0, end + 1);
        }
        if (format != "ds" && format != "bs")
            throw IoError(file.string() + ": missing or invalid header, expected 'format: ds|bs'");

        std::string line;
        size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                corpus.traces.push_back(parse_trace_line(line, format, trace_length));
            } catch (const Error& e) {
                throw IoError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
            }
            corpus.labels.push_back(cls);
        }
    }
    if (cls == 0) throw IoError("no class_<idx>.txt files in " + dir.string());
    corpus.num_classes = cls;
    return corpus;
}

static void write_value(std::ostream& os, double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        os << static_cast<long long>(v);
    } else {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        os << buf;
    }
}

void save_corpus(const TraceCorpus& corpus, const fs::path& dir) {
    corpus.validate();
    fs::create_directories(dir);
    for (int cls = 0; cls < corpus.num_classes; ++cls) {
        fs::path file = dir / ("class_" + std::to_string(cls) + ".txt");
        std::ofstream out(file);
        if (!out) throw IoError("cannot write " + file.string());
        out << "format: bs\n";
        for (size_t i = 0; i < corpus.traces.size(); ++i) {
            if (corpus.labels[i] != cls) continue;
            const FixedTrace& t = corpus.traces[i];
            for (int j = 0; j < t.original_burst_count; ++j) {
                if (j > 0) out << ' ';
                write_value(out, t.values[static_cast<size_t>(j)]);
            }
            out << '\n';
        }
    }
}

} // namespace awa
