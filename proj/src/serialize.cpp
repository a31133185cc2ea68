#include "leaklab/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace leaklab {

static_assert(std::endian::native == std::endian::little,
              "serialized float64 payloads assume a little-endian host");

namespace {
constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (std::size_t i = 0; i < len; i += 3) {
    unsigned v = p[i] << 16;
    if (i + 1 < len) v |= p[i + 1] << 8;
    if (i + 2 < len) v |= p[i + 2];
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(i + 1 < len ? kB64[(v >> 6) & 63] : '=');
    out.push_back(i + 2 < len ? kB64[v & 63] : '=');
  }
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& s) {
  auto val = [](char ch) -> int {
    if (ch >= 'A' && ch <= 'Z') return ch - 'A';
    if (ch >= 'a' && ch <= 'z') return ch - 'a' + 26;
    if (ch >= '0' && ch <= '9') return ch - '0' + 52;
    if (ch == '+') return 62;
    if (ch == '/') return 63;
    return -1;
  };
  std::vector<unsigned char> out;
  out.reserve(s.size() / 4 * 3);
  int buf = 0, bits = 0;
  for (char ch : s) {
    if (ch == '=' || ch == '\n') continue;
    int v = val(ch);
    if (v < 0) throw std::invalid_argument("base64_decode: bad character");
    buf = (buf << 6) | v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<unsigned char>((buf >> bits) & 0xff));
    }
  }
  return out;
}

json matrix_to_json(const Matrix& m) {
  // row-major copy so the payload layout is independent of Eigen defaults
  std::vector<double> buf(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      buf[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
  return json{{"rows", m.rows()},
              {"cols", m.cols()},
              {"data_b64", base64_encode(buf.data(), buf.size() * sizeof(double))}};
}

Matrix matrix_from_json(const json& j) {
  Index rows = j.at("rows").get<Index>();
  Index cols = j.at("cols").get<Index>();
  auto bytes = base64_decode(j.at("data_b64").get<std::string>());
  if (bytes.size() != static_cast<std::size_t>(rows * cols) * sizeof(double))
    throw std::invalid_argument("matrix_from_json: payload size mismatch");
  Matrix m(rows, cols);
  const double* p = reinterpret_cast<const double*>(bytes.data());
  for (Index i = 0; i < rows; ++i)
    for (Index j2 = 0; j2 < cols; ++j2) m(i, j2) = p[i * cols + j2];
  return m;
}

json dataset_to_json(const Dataset& ds) {
  return json{{"schema", "leaklab.dataset.v1"},
              {"kind", dataset_kind_name(ds.kind)},
              {"c", ds.c},
              {"seed", ds.seed},
              {"inputs", matrix_to_json(ds.inputs)},
              {"labels", ds.labels}};
}

Dataset dataset_from_json(const json& j) {
  Dataset ds;
  ds.kind = dataset_kind_from_name(j.at("kind").get<std::string>());
  ds.c = j.at("c").get<int>();
  ds.seed = j.value("seed", std::uint64_t{0});
  ds.inputs = matrix_from_json(j.at("inputs"));
  ds.labels = j.at("labels").get<std::vector<int>>();
  return ds;
}

json partition_to_json(const Partition& p) {
  json j{{"schema", "leaklab.partition.v1"},
         {"teacher_frac", p.teacher_frac},
         {"rho", p.rho},
         {"teacher_idx", p.teacher_idx},
         {"student_train_idx", p.student_train_idx},
         {"student_test_idx", p.student_test_idx},
         {"val_idx", p.val_idx}};
  if (p.val_data) j["val_data"] = dataset_to_json(*p.val_data);
  return j;
}

Partition partition_from_json(const json& j) {
  Partition p;
  p.teacher_frac = j.at("teacher_frac").get<double>();
  p.rho = j.at("rho").get<double>();
  p.teacher_idx = j.at("teacher_idx").get<IndexSet>();
  p.student_train_idx = j.at("student_train_idx").get<IndexSet>();
  p.student_test_idx = j.at("student_test_idx").get<IndexSet>();
  p.val_idx = j.at("val_idx").get<IndexSet>();
  if (j.contains("val_data")) p.val_data = dataset_from_json(j.at("val_data"));
  return p;
}

json model_to_json(const Model& m) {
  json layers = json::array();
  for (const Layer& layer : m.layers) {
    json jl{{"W", matrix_to_json(layer.W)}, {"has_bias", layer.has_bias}};
    if (layer.has_bias) jl["b"] = matrix_to_json(layer.b);
    layers.push_back(std::move(jl));
  }
  return json{{"schema", "leaklab.model.v1"},
              {"arch", arch_name(m.arch)},
              {"widths", m.widths},
              {"layers", layers}};
}

Model model_from_json(const json& j) {
  Model m;
  m.arch = arch_from_name(j.at("arch").get<std::string>());
  m.widths = j.at("widths").get<std::vector<Index>>();
  for (const json& jl : j.at("layers")) {
    Layer layer;
    layer.W = matrix_from_json(jl.at("W"));
    layer.has_bias = jl.at("has_bias").get<bool>();
    layer.b = layer.has_bias ? Vector(matrix_from_json(jl.at("b")))
                             : Vector(Vector::Zero(layer.W.rows()));
    m.layers.push_back(std::move(layer));
  }
  return m;
}

json softlabels_to_json(const SoftLabelSet& s) {
  return json{{"schema", "leaklab.softlabels.v1"},
              {"tau", s.tau},
              {"transform", s.transform.tag()},
              {"probs", matrix_to_json(s.probs)}};
}

SoftLabelSet softlabels_from_json(const json& j) {
  SoftLabelSet s;
  s.tau = j.at("tau").get<double>();
  s.transform = Transform::parse(j.at("transform").get<std::string>());
  s.probs = matrix_from_json(j.at("probs"));
  return s;
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return json::parse(in);
}

}  // namespace leaklab
