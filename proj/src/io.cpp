#include "pemscl/io.hpp"

#include <fstream>
#include <sstream>

#include "pemscl/error.hpp"

namespace pemscl {

using nlohmann::json;

namespace {

json vector_to_json(const Vector& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector vector_from_json(const json& j, const std::string& field) {
    if (!j.is_array()) fail(ErrorKind::Parse, "field '" + field + "' must be an array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) fail(ErrorKind::Parse, "field '" + field + "' holds a non-number");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

const json& field(const json& record, const char* name) {
    auto it = record.find(name);
    if (it == record.end()) fail(ErrorKind::Parse, std::string("missing field '") + name + "'");
    return *it;
}

json mentions_to_json(const std::vector<Mention>& mentions) {
    json out = json::array();
    for (const Mention& m : mentions) {
        out.push_back({{"entity_id", m.entity_id}, {"embedding", vector_to_json(m.embedding)}});
    }
    return out;
}

std::vector<Mention> mentions_from_json(const json& j, const char* name) {
    if (!j.is_array()) fail(ErrorKind::Parse, std::string("field '") + name + "' must be an array");
    std::vector<Mention> out;
    for (const json& m : j) {
        out.push_back({field(m, "entity_id").get<EntityId>(),
                       vector_from_json(field(m, "embedding"), std::string(name) + ".embedding")});
    }
    return out;
}

LabelSet labels_from_json(const json& j, const char* name) {
    if (!j.is_array()) fail(ErrorKind::Parse, std::string("field '") + name + "' must be an array");
    std::vector<RelationIndex> labels;
    for (const json& r : j) labels.push_back(r.get<RelationIndex>());
    return make_label_set(std::move(labels));
}

}  // namespace

json example_to_json(const PairExample& ex) {
    json j;
    j["doc_id"] = ex.doc_id;
    j["head_id"] = ex.head_id;
    j["tail_id"] = ex.tail_id;
    j["head_name"] = ex.head_name;
    j["tail_name"] = ex.tail_name;
    j["head_mentions"] = mentions_to_json(ex.head_mentions);
    j["tail_mentions"] = mentions_to_json(ex.tail_mentions);
    j["context"] = vector_to_json(ex.context);
    j["positive_relations"] = ex.positive_relations;
    j["gold_positive_relations"] =
        ex.gold_positive_relations ? json(*ex.gold_positive_relations) : json(nullptr);
    return j;
}

PairExample example_from_json(const json& j) {
    PairExample ex;
    try {
        ex.doc_id = field(j, "doc_id").get<std::string>();
        ex.head_id = field(j, "head_id").get<EntityId>();
        ex.tail_id = field(j, "tail_id").get<EntityId>();
        ex.head_name = j.value("head_name", "E" + std::to_string(ex.head_id));
        ex.tail_name = j.value("tail_name", "E" + std::to_string(ex.tail_id));
        ex.head_mentions = mentions_from_json(field(j, "head_mentions"), "head_mentions");
        ex.tail_mentions = mentions_from_json(field(j, "tail_mentions"), "tail_mentions");
        ex.context = vector_from_json(field(j, "context"), "context");
        ex.positive_relations = labels_from_json(field(j, "positive_relations"), "positive_relations");
        auto gold = j.find("gold_positive_relations");
        if (gold != j.end() && !gold->is_null()) {
            ex.gold_positive_relations = labels_from_json(*gold, "gold_positive_relations");
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::Parse, std::string("malformed example record: ") + e.what());
    }
    return ex;
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
    json header;
    header["record"] = "corpus";
    header["format_version"] = kCorpusFormatVersion;
    header["label_source"] = to_string(corpus.label_source);
    header["embedding_dim"] = corpus.embedding_dim;
    header["relations"] = corpus.vocabulary.relations();
    header["train_frequency"] = corpus.vocabulary.frequencies();
    out << header.dump() << '\n';
    for (const PairExample& ex : corpus.examples) {
        out << example_to_json(ex).dump() << '\n';
    }
}

Corpus read_corpus(std::istream& in, const std::string& origin) {
    std::string line;
    std::size_t line_no = 0;
    Corpus corpus;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            fail(ErrorKind::Parse, origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
        try {
            if (!have_header) {
                if (j.value("record", "") != "corpus") {
                    fail(ErrorKind::Parse, origin + ": first line must be the corpus header");
                }
                const int version = j.value("format_version", 0);
                if (version != kCorpusFormatVersion) {
                    fail(ErrorKind::Parse, origin + ": unsupported corpus format_version " +
                                               std::to_string(version));
                }
                corpus.vocabulary = RelationVocabulary(
                    field(j, "relations").get<std::vector<std::string>>());
                if (j.contains("train_frequency")) {
                    corpus.vocabulary.set_frequencies(
                        j["train_frequency"].get<std::vector<std::size_t>>());
                }
                corpus.label_source = parse_label_source(field(j, "label_source").get<std::string>());
                corpus.embedding_dim = field(j, "embedding_dim").get<std::size_t>();
                have_header = true;
                continue;
            }
            corpus.examples.push_back(example_from_json(j));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Parse) throw;
            fail(ErrorKind::Parse, origin + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const json::exception& e) {
            fail(ErrorKind::Parse, origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_header) fail(ErrorKind::Parse, origin + ": missing corpus header");
    corpus.validate();
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ostringstream out;
    write_corpus(corpus, out);
    write_text_file(path, out.str());
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open corpus file " + path.string());
    return read_corpus(in, path.string());
}

namespace {

json matrix_to_json(const Matrix& m) {
    return {{"rows", m.rows()},
            {"cols", m.cols()},
            {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Matrix matrix_from_json(const json& j, const std::string& name) {
    const auto rows = field(j, "rows").get<Eigen::Index>();
    const auto cols = field(j, "cols").get<Eigen::Index>();
    const auto data = field(j, "data").get<std::vector<double>>();
    require(static_cast<Eigen::Index>(data.size()) == rows * cols, ErrorKind::Parse,
            "tensor " + name + " payload has " + std::to_string(data.size()) + " values for " +
                std::to_string(rows) + "x" + std::to_string(cols));
    Matrix m(rows, cols);
    std::copy(data.begin(), data.end(), m.data());
    return m;
}

}  // namespace

json checkpoint_to_json(const HeadParams& p) {
    json doc;
    doc["format"] = "pemscl-head-checkpoint";
    doc["format_version"] = kCheckpointFormatVersion;
    doc["group_count"] = p.group_count;
    doc["tensors"] = {{"W_h", matrix_to_json(p.w_h)},   {"W_t", matrix_to_json(p.w_t)},
                      {"W_c1", matrix_to_json(p.w_c1)}, {"W_c2", matrix_to_json(p.w_c2)},
                      {"W_o", matrix_to_json(p.w_o)},   {"b_o", matrix_to_json(Matrix(p.b_o.transpose()))}};
    return doc;
}

HeadParams checkpoint_from_json(const json& doc) {
    HeadParams p;
    try {
        if (doc.value("format", "") != "pemscl-head-checkpoint") {
            fail(ErrorKind::Parse, "not a head checkpoint");
        }
        if (doc.value("format_version", 0) != kCheckpointFormatVersion) {
            fail(ErrorKind::Parse, "unsupported checkpoint format_version");
        }
        p.group_count = field(doc, "group_count").get<std::size_t>();
        const json& t = field(doc, "tensors");
        p.w_h = matrix_from_json(field(t, "W_h"), "W_h");
        p.w_t = matrix_from_json(field(t, "W_t"), "W_t");
        p.w_c1 = matrix_from_json(field(t, "W_c1"), "W_c1");
        p.w_c2 = matrix_from_json(field(t, "W_c2"), "W_c2");
        p.w_o = matrix_from_json(field(t, "W_o"), "W_o");
        const Matrix b = matrix_from_json(field(t, "b_o"), "b_o");
        p.b_o = Eigen::Map<const Vector>(b.data(), b.size());
    } catch (const json::exception& e) {
        fail(ErrorKind::Parse, std::string("malformed checkpoint: ") + e.what());
    }
    p.validate();
    return p;
}

void save_checkpoint(const HeadParams& params, const std::filesystem::path& path) {
    write_text_file(path, checkpoint_to_json(params).dump() + "\n");
}

HeadParams load_checkpoint(const std::filesystem::path& path) {
    try {
        return checkpoint_from_json(json::parse(read_text_file(path)));
    } catch (const json::exception& e) {
        fail(ErrorKind::Parse, path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    out << text;
    if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace pemscl
