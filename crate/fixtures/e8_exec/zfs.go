package zfs

import (
	"bytes"
	"fmt"
	"os/exec"
	"strings"
)

type command struct {
	Command string
}

func (c *command) Run(arg ...string) ([][]string, error) {
	cmd := exec.Command(c.Command, arg...)

	var stdout, stderr bytes.Buffer
	cmd.Stdout = &stdout
	cmd.Stderr = &stderr

	if err := cmd.Run(); err != nil {
		return nil, fmt.Errorf("%s %s: %s", c.Command, strings.Join(arg, " "), stderr.String())
	}

	var output [][]string
	for _, line := range strings.Split(stdout.String(), "\n") {
		if line != "" {
			output = append(output, strings.Fields(line))
		}
	}
	return output, nil
}

// ListDatasets returns the rows printed by the dataset listing tool.
func ListDatasets() ([][]string, error) {
	c := command{Command: "zfs"}
	return c.Run("list", "-H")
}
