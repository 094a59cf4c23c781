#pragma once

namespace flowcast {

/// Entry point of the `flowcast` command-line tool. Returns the process exit
/// status; all failures print one line `ERROR:<code>: <message>` to stderr.
int cli_main(int argc, const char* const* argv);

}  // namespace flowcast
