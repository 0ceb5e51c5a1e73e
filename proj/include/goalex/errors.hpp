#pragma once

#include <stdexcept>
#include <string>

namespace goalex {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// domain-model
struct SchemaError : Error { using Error::Error; };
struct IntegrityError : Error { using Error::Error; };

// prompting
struct MissingPlaceholder : Error { using Error::Error; };
struct TemplateError : Error { using Error::Error; };
struct StoreIncomplete : Error { using Error::Error; };

// llm-gateway
struct OutputParseFailure : Error { using Error::Error; };
struct CritiqueParseFailure : Error { using Error::Error; };
struct ProviderUnreachable : Error { using Error::Error; };
struct RateLimited : Error { using Error::Error; };
struct ReplayMiss : Error { using Error::Error; };

// evaluation
struct BackendUnreachable : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct ZeroVector : Error { using Error::Error; };

// cli-reporting
struct ConfigError : Error { using Error::Error; };
struct CellMismatch : Error { using Error::Error; };

struct PreconditionViolation : Error { using Error::Error; };

}  // namespace goalex
