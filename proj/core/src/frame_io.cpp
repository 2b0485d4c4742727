#include "bosonsim/frame_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "bosonsim/errors.hpp"
#include "json.hpp"

namespace bosonsim {
namespace {

void put_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

void write_frame_jsonl(std::ostream& out, const Frame& frame) {
  std::string line;
  line.reserve(48 + 44 * frame.points.size());
  char id[32];
  std::snprintf(id, sizeof id, "%" PRIu64, frame.frame_id);
  line += "{\"frame_id\":";
  line += id;
  if (frame.geometry) {
    line += ",\"t\":";
    put_number(line, frame.geometry->t);
    line += ",\"eta\":";
    put_number(line, frame.geometry->eta);
    line += ",\"s\":";
    if (frame.geometry->s)
      put_number(line, *frame.geometry->s);
    else
      line += "null";
  } else {
    line += ",\"t\":null,\"eta\":null,\"s\":null";
  }
  line += ",\"points\":[";
  for (std::size_t i = 0; i < frame.points.size(); ++i) {
    if (i) line += ',';
    line += '[';
    put_number(line, frame.points[i].x);
    line += ',';
    put_number(line, frame.points[i].y);
    line += ']';
  }
  line += "]}\n";
  out << line;
}

std::vector<Frame> read_frames_jsonl(std::istream& in, const ModeBasis& basis) {
  std::vector<Frame> frames;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Frame f;
      f.frame_id = j.at("frame_id").get<std::uint64_t>();
      if (!j.at("t").is_null()) {
        Geometry g;
        g.basis = basis;
        g.t = j.at("t").get<double>();
        g.eta = j.at("eta").get<double>();
        if (!j.at("s").is_null()) g.s = j.at("s").get<double>();
        f.geometry = g;
      }
      for (const auto& p : j.at("points")) f.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      frames.push_back(std::move(f));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("frame line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return frames;
}

}  // namespace bosonsim
