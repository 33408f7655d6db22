#include "support.hpp"

#include <json.hpp>

namespace jargon::test {

std::string to_jsonl(const std::vector<RawDocument>& docs) {
  std::string out;
  for (const auto& d : docs) {
    nlohmann::ordered_json j;
    j["id"] = d.id;
    j["text"] = d.text;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace jargon::test
