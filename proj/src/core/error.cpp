#include "ivmc/core/error.hpp"

namespace ivmc {

const char *error_kind_name(ErrorKind kind) {
	switch (kind) {
	case ErrorKind::PARSE:
		return "parse";
	case ErrorKind::UNSUPPORTED:
		return "unsupported";
	case ErrorKind::BINDER:
		return "binder";
	case ErrorKind::TYPE:
		return "type";
	case ErrorKind::SCHEMA_MISMATCH:
		return "schema-mismatch";
	case ErrorKind::NEGATIVE_STATE:
		return "negative-state";
	case ErrorKind::COLLISION:
		return "collision";
	case ErrorKind::CONSTRAINT:
		return "constraint";
	case ErrorKind::OVERFLOW:
		return "overflow";
	case ErrorKind::CHANGELOG:
		return "changelog";
	case ErrorKind::IO:
		return "io";
	case ErrorKind::CATALOG:
		return "catalog";
	case ErrorKind::INJECTED:
		return "injected";
	case ErrorKind::INTERNAL:
		return "internal";
	}
	return "unknown";
}

} // namespace ivmc
