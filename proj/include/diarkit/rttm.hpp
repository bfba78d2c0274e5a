#pragma once

// RTTM reading/writing and URI list files.
//
// Each RTTM line has ten whitespace-separated fields:
//
//   SPEAKER <file> <chan> <onset> <dur> <NA> <NA> <speaker> <NA> <NA>
//
// The writer is byte-deterministic: times are printed on the millisecond grid
// with exactly three decimals, lines are sorted by (file, onset, speaker) and
// terminated by LF.

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "diarkit/timeline.hpp"

namespace diarkit {

struct RttmDocument {
  std::map<std::string, Annotation> files;
  // Records with a type other than SPEAKER, or zero duration.
  std::size_t skipped_records = 0;
};

// Throws ParseError (MalformedLine, NegativeDuration, NegativeOnset).
RttmDocument parse_rttm(std::string_view text);
RttmDocument read_rttm(const std::filesystem::path& path);

std::string write_rttm(const std::map<std::string, Annotation>& annotations);
std::string write_rttm(const Annotation& annotation);

// Fixed three-decimal rendering on the millisecond grid ("12.345").
std::string format_seconds(double seconds);

// One id per line. Duplicates throw Error(DuplicateUri).
std::vector<std::string> read_uri_list(std::string_view text);
std::string write_uri_list(std::vector<std::string> uris);

// Whole-file helpers; throw Error(IoFailure).
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace diarkit
