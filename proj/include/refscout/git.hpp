#pragma once

#include <string>
#include <vector>

#include "refscout/errors.hpp"
#include "refscout/process.hpp"
#include "refscout/util.hpp"

namespace refscout {

/// Read-only access to a Git object store via the git CLI.
class GitRepo {
public:
    static GitRepo open(const std::string& path) {
        CommandResult r = run_command({"git", "-C", path, "rev-parse", "--git-dir"});
        if (r.exit_code != 0) throw RepoNotFound("not a git repository: " + path);
        return GitRepo(path);
    }

    const std::string& path() const { return path_; }

    /// Name of the branch HEAD points at.
    std::string head_branch() const {
        CommandResult r = git({"rev-parse", "--abbrev-ref", "HEAD"});
        if (r.exit_code != 0) throw BranchNotFound("cannot resolve HEAD in " + path_);
        std::string out = r.out;
        while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
        return out;
    }

    /// First-parent history of `branch`, oldest commit first.
    std::vector<std::string> rev_list_first_parent(const std::string& branch) const {
        CommandResult check = git({"rev-parse", "--verify", "--quiet", branch + "^{commit}"});
        if (check.exit_code != 0)
            throw BranchNotFound("branch '" + branch + "' not found in " + path_);
        CommandResult r = git({"rev-list", "--first-parent", "--reverse", branch, "--"});
        if (r.exit_code != 0) throw Error("git rev-list failed: " + r.err);
        std::vector<std::string> commits;
        for (auto& line : split(r.out, '\n'))
            if (!line.empty()) commits.push_back(line);
        return commits;
    }

    struct DiffEntry {
        char status = 'M';    // A, D, M, R
        int similarity = 0;   // for renames
        std::string old_path;
        std::string new_path;  // equals old_path except for renames
    };

    /// Changed files between two commits, rename detection at 50%.
    std::vector<DiffEntry> diff_tree(const std::string& from, const std::string& to) const {
        CommandResult r = git({"diff-tree", "-r", "-z", "-M50%", "--no-commit-id", from, to});
        if (r.exit_code != 0) throw Error("git diff-tree failed: " + r.err);
        std::vector<DiffEntry> entries;
        const std::string& raw = r.out;
        std::size_t i = 0;
        auto next_field = [&]() {
            std::size_t start = i;
            while (i < raw.size() && raw[i] != '\0') ++i;
            std::string field = raw.substr(start, i - start);
            if (i < raw.size()) ++i;  // skip NUL
            return field;
        };
        while (i < raw.size()) {
            std::string meta = next_field();
            if (meta.empty() || meta[0] != ':') break;
            auto parts = split(meta.substr(1), ' ');
            if (parts.size() < 5) break;
            const std::string& status_field = parts[4];
            DiffEntry e;
            e.status = status_field[0];
            if (status_field.size() > 1) e.similarity = static_cast<int>(parse_int(status_field.substr(1)));
            e.old_path = next_field();
            e.new_path = (e.status == 'R' || e.status == 'C') ? next_field() : e.old_path;
            entries.push_back(std::move(e));
        }
        return entries;
    }

    /// File contents at a commit.
    std::string show_file(const std::string& commit, const std::string& file_path) const {
        CommandResult r = git({"show", commit + ":" + file_path});
        if (r.exit_code != 0)
            throw IoError("cannot read " + file_path + " at " + commit + ": " + r.err);
        return r.out;
    }

private:
    explicit GitRepo(std::string path) : path_(std::move(path)) {}

    CommandResult git(std::vector<std::string> args) const {
        std::vector<std::string> argv = {"git", "-C", path_};
        for (auto& a : args) argv.push_back(std::move(a));
        return run_command(argv);
    }

    std::string path_;
};

}  // namespace refscout
