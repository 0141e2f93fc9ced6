#include "core/aer_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "core/io_util.hpp"

namespace evatt {

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line,
                             const std::string& what) {
  fail(ErrorKind::Parse,
       path + ":" + std::to_string(line) + ": " + what);
}

bool parse_int(const char*& p, const char* end, std::int64_t& out) {
  auto [ptr, ec] = std::from_chars(p, end, out);
  if (ec != std::errc()) return false;
  p = ptr;
  return true;
}

}  // namespace

EventStream read_aer(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);

  EventStream stream;
  std::string line;
  int line_no = 0;
  bool header_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      int w = 0, h = 0;
      if (std::sscanf(line.c_str(), "# aer v1 W=%d H=%d", &w, &h) != 2)
        parse_fail(path, line_no, "missing '# aer v1 W=<w> H=<h>' header");
      if (w <= 0 || h <= 0)
        parse_fail(path, line_no, "non-positive geometry in header");
      stream.geom = {w, h};
      header_seen = true;
      continue;
    }
    if (line.empty() || line[0] == '#') continue;

    const char* p = line.data();
    const char* end = p + line.size();
    std::int64_t v[4];
    for (int i = 0; i < 4; ++i) {
      if (i > 0) {
        if (p == end || *p != ',')
          parse_fail(path, line_no, "expected 't,x,y,p'");
        ++p;
      }
      if (!parse_int(p, end, v[i]))
        parse_fail(path, line_no, "expected 't,x,y,p'");
    }
    if (p != end) parse_fail(path, line_no, "trailing characters");
    if (v[0] < 0) parse_fail(path, line_no, "negative timestamp");
    if (v[3] != 1 && v[3] != -1)
      parse_fail(path, line_no,
                 "polarity " + std::to_string(v[3]) + " not in {1,-1}");
    if (!stream.geom.contains(static_cast<int>(v[1]), static_cast<int>(v[2])))
      fail(ErrorKind::Geometry,
           path + ":" + std::to_string(line_no) + ": event outside geometry");
    stream.events.push_back(Event{v[0], static_cast<int>(v[1]),
                                  static_cast<int>(v[2]),
                                  static_cast<int>(v[3])});
  }
  if (!header_seen) fail(ErrorKind::Parse, path + ": empty file, no header");
  return stream;
}

void write_aer(const EventStream& stream, const std::string& path) {
  AtomicFile file(path);
  auto& out = file.stream();
  out << "# aer v1 W=" << stream.geom.width << " H=" << stream.geom.height
      << "\n";
  for (const Event& e : stream.events) {
    if (e.p != 1 && e.p != -1)
      fail(ErrorKind::Range, "polarity must be +1 or -1");
    if (!stream.geom.contains(e.x, e.y))
      fail(ErrorKind::Geometry, "event outside geometry");
    out << e.t << ',' << e.x << ',' << e.y << ',' << e.p << '\n';
  }
  file.commit();
}

void write_frame_pgm(const EventFrame& frame, const std::string& path) {
  GrayImage img;
  img.width = frame.geom.width;
  img.height = frame.geom.height;
  img.pixels.resize(frame.cells.size());
  for (std::size_t i = 0; i < frame.cells.size(); ++i)
    img.pixels[i] = frame.cells[i] > 0 ? 255 : (frame.cells[i] < 0 ? 0 : 128);
  write_pgm(img, path);
}

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);

  auto next_token = [&]() -> std::string {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
      if (c == '#') {
        while ((c = in.get()) != EOF && c != '\n') {}
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(static_cast<char>(c));
    }
    return tok;
  };

  if (next_token() != "P5") fail(ErrorKind::Parse, path + ": not a P5 PGM");
  GrayImage img;
  try {
    img.width = std::stoi(next_token());
    img.height = std::stoi(next_token());
    int maxval = std::stoi(next_token());
    if (maxval <= 0 || maxval > 255)
      fail(ErrorKind::Parse, path + ": unsupported maxval");
  } catch (const std::logic_error&) {
    fail(ErrorKind::Parse, path + ": malformed PGM header");
  }
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()), img.pixels.size());
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
    fail(ErrorKind::Parse, path + ": truncated pixel data");
  return img;
}

void write_pgm(const GrayImage& image, const std::string& path) {
  AtomicFile file(path, true);
  auto& out = file.stream();
  out << "P5\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            image.pixels.size());
  file.commit();
}

void dump_frames_pgm(const FrameSequence& seq, const std::string& dir,
                     const std::string& prefix) {
  std::filesystem::create_directories(dir);
  char name[32];
  for (const EventFrame& f : seq.frames) {
    std::snprintf(name, sizeof(name), "%s%05d.pgm", prefix.c_str(),
                  f.frame_index);
    write_frame_pgm(f, dir + "/" + name);
  }
}

}  // namespace evatt
