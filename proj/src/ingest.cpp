#include "prism/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "prism/errors.hpp"
#include "prism/image.hpp"
#include "prism/util.hpp"

namespace prism::ingest {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string frame_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06d.jpg", index);
  return buf;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out += "'";
  return out;
}

std::string render_template(std::string cmd, const std::string& key, const std::string& value) {
  std::size_t pos;
  while ((pos = cmd.find(key)) != std::string::npos) cmd.replace(pos, key.size(), value);
  return cmd;
}

std::vector<fs::path> sorted_stills(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = util::to_lower(entry.path().extension().string());
    if (ext == ".jpg" || ext == ".jpeg" || ext == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return files;
}

std::vector<FrameRecord> records_for(const fs::path& frames_dir, double fps) {
  std::vector<fs::path> produced = sorted_stills(frames_dir);
  if (produced.empty()) throw EmptyVideoError("no decodable frames in source");
  std::vector<FrameRecord> out;
  out.reserve(produced.size());
  for (std::size_t i = 0; i < produced.size(); ++i) {
    FrameRecord rec;
    rec.index = static_cast<int>(i);
    rec.timestamp_s = static_cast<double>(i) / fps;
    rec.image_ref = produced[i].string();
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

std::vector<FrameRecord> extract_frames(const VideoSource& source, const std::string& out_dir,
                                        const IngestOptions& options) {
  if (source.fps <= 0.0) throw ConfigError("ingest fps must be positive");
  if (!fs::exists(source.path)) throw IoError("source not found: " + source.path);
  fs::path frames_dir = fs::path(out_dir) / "frames";
  fs::create_directories(frames_dir);

  if (source.kind == VideoSource::Kind::video_file) {
    std::string pattern = (frames_dir / "%06d.jpg").string();
    std::string cmd = options.decoder_cmd;
    cmd = render_template(cmd, "{input}", shell_quote(source.path));
    cmd = render_template(cmd, "{fps}", util::fmt_double(source.fps));
    cmd = render_template(cmd, "{pattern}", shell_quote(pattern));
    int rc = std::system(cmd.c_str());
    if (rc != 0) throw IoError("decoder command failed (" + std::to_string(rc) + "): " + cmd);
    std::vector<FrameRecord> records = records_for(frames_dir, source.fps);
    if (options.resize > 0) {
      for (auto& rec : records) {
        image::transcode_jpeg(rec.image_ref, rec.image_ref, options.jpeg_quality, options.resize);
      }
    }
    return records;
  }

  // Image directory: one record per lexicographically sorted still, synthetic
  // timestamps index/fps, re-encoded into the run layout.
  std::vector<fs::path> sources = sorted_stills(source.path);
  if (sources.empty()) throw EmptyVideoError("no stills in directory: " + source.path);
  std::vector<FrameRecord> out;
  out.reserve(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    fs::path dst = frames_dir / frame_name(static_cast<int>(i));
    image::transcode_jpeg(sources[i].string(), dst.string(), options.jpeg_quality, options.resize);
    FrameRecord rec;
    rec.index = static_cast<int>(i);
    rec.timestamp_s = static_cast<double>(i) / source.fps;
    rec.image_ref = dst.string();
    out.push_back(std::move(rec));
  }
  return out;
}

namespace {

// "HH:MM:SS,mmm" (SRT) or "[HH:]MM:SS.mmm" (WebVTT).
bool parse_timestamp(const std::string& text, double* out) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  if (parts.size() < 2 || parts.size() > 3) return false;
  double seconds = 0.0;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (parts[i].empty() ||
        !std::all_of(parts[i].begin(), parts[i].end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      return false;
    }
    seconds = seconds * 60.0 + std::stod(parts[i]);
  }
  std::string sec = parts.back();
  std::replace(sec.begin(), sec.end(), ',', '.');
  char* end = nullptr;
  double frac = std::strtod(sec.c_str(), &end);
  if (end == sec.c_str() || *end != '\0') return false;
  *out = seconds * 60.0 + frac;
  return true;
}

bool is_cue_timing(const std::string& line) { return line.find("-->") != std::string::npos; }

Transcript parse_cues(const std::string& content, bool vtt) {
  Transcript out;
  std::istringstream in(content);
  std::string line;
  int line_no = 0;
  bool header_skipped = !vtt;
  std::vector<std::string> pending_text;
  TranscriptSegment current;
  bool in_cue = false;

  auto flush = [&]() {
    if (!in_cue) return;
    std::string text;
    for (const auto& t : pending_text) {
      if (!text.empty()) text += " ";
      text += t;
    }
    current.text = text;
    out.segments.push_back(current);
    pending_text.clear();
    in_cue = false;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_skipped) {
      header_skipped = true;
      if (line.rfind("WEBVTT", 0) == 0) continue;
    }
    std::string trimmed = util::trim(line);
    if (trimmed.empty()) {
      flush();
      continue;
    }
    if (is_cue_timing(trimmed)) {
      flush();
      auto arrow = trimmed.find("-->");
      std::string lhs = util::trim(trimmed.substr(0, arrow));
      std::string rhs = util::trim(trimmed.substr(arrow + 3));
      // WebVTT allows cue settings after the end timestamp.
      auto space = rhs.find(' ');
      if (space != std::string::npos) rhs = rhs.substr(0, space);
      double start = 0.0;
      double end = 0.0;
      if (!parse_timestamp(lhs, &start) || !parse_timestamp(rhs, &end) || end < start) {
        throw ParseError("malformed cue timing: " + trimmed, line_no);
      }
      if (!out.segments.empty() && start < out.segments.back().end_s) {
        throw ParseError("overlapping cue starting at " + lhs, line_no);
      }
      current = TranscriptSegment{start, end, ""};
      in_cue = true;
      continue;
    }
    if (in_cue) {
      pending_text.push_back(trimmed);
    }
    // Lines outside a cue (cue ids, comments) are ignored.
  }
  flush();
  for (const auto& seg : out.segments) {
    if (!out.full_text.empty() && !seg.text.empty()) out.full_text += " ";
    out.full_text += seg.text;
  }
  return out;
}

}  // namespace

Transcript load_transcript(const std::string& path) {
  std::string content = util::read_file(path);
  std::string ext = util::to_lower(fs::path(path).extension().string());
  if (ext == ".srt" || ext == ".vtt") {
    return parse_cues(content, ext == ".vtt");
  }
  Transcript out;
  std::string text = util::trim(content);
  if (text.empty()) return out;
  out.segments.push_back(
      TranscriptSegment{0.0, std::numeric_limits<double>::infinity(), text});
  out.full_text = text;
  return out;
}

void write_frames_manifest(const std::string& path, std::span<const FrameRecord> frames) {
  json arr = json::array();
  for (const auto& f : frames) {
    arr.push_back({{"index", f.index}, {"timestamp_s", f.timestamp_s}, {"image_ref", f.image_ref}});
  }
  util::atomic_write_file(path, arr.dump(2) + "\n");
}

std::vector<FrameRecord> read_frames_manifest(const std::string& path) {
  json arr = json::parse(util::read_file(path));
  std::vector<FrameRecord> out;
  for (const auto& item : arr) {
    FrameRecord rec;
    rec.index = item.at("index").get<int>();
    rec.timestamp_s = item.at("timestamp_s").get<double>();
    rec.image_ref = item.at("image_ref").get<std::string>();
    out.push_back(std::move(rec));
  }
  return out;
}

void write_transcript_json(const std::string& path, const Transcript& transcript) {
  json segments = json::array();
  for (const auto& seg : transcript.segments) {
    json j = {{"start_s", seg.start_s}, {"text", seg.text}};
    if (std::isinf(seg.end_s)) {
      j["end_s"] = nullptr;
    } else {
      j["end_s"] = seg.end_s;
    }
    segments.push_back(j);
  }
  json doc = {{"segments", segments}, {"full_text", transcript.full_text}};
  util::atomic_write_file(path, doc.dump(2) + "\n");
}

Transcript read_transcript_json(const std::string& path) {
  json doc = json::parse(util::read_file(path));
  Transcript out;
  for (const auto& item : doc.at("segments")) {
    TranscriptSegment seg;
    seg.start_s = item.at("start_s").get<double>();
    seg.end_s = item.at("end_s").is_null() ? std::numeric_limits<double>::infinity()
                                           : item.at("end_s").get<double>();
    seg.text = item.at("text").get<std::string>();
    out.segments.push_back(std::move(seg));
  }
  out.full_text = doc.at("full_text").get<std::string>();
  return out;
}

}  // namespace prism::ingest
