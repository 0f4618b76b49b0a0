#include "cavks/version.hpp"
namespace cavks { const char* cli_placeholder() { return version_string; } }
