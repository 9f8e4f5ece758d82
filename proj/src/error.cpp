#include "digestweaver/error.hpp"

namespace digestweaver {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Schema: return "E_SCHEMA";
    case ErrorCode::DupRank: return "E_DUP_RANK";
    case ErrorCode::EmptyQuery: return "E_EMPTY_QUERY";
    case ErrorCode::NotOk: return "E_NOT_OK";
    case ErrorCode::StoreCorrupt: return "E_STORE_CORRUPT";
    case ErrorCode::Io: return "E_IO";
    case ErrorCode::NoTokens: return "E_NO_TOKENS";
    case ErrorCode::InvalidConfig: return "E_INVALID_CONFIG";
  }
  return "E_UNKNOWN";
}

}  // namespace digestweaver
