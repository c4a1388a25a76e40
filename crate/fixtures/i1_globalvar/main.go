package main

import (
	"fmt"
	"os"
)

var hostname = lookupHost()

var banner = func() string {
	return "build " + os.Getenv("BUILD_ID")
}()

var retries = 3

func lookupHost() string {
	name, err := os.Hostname()
	if err != nil {
		return "unknown"
	}
	return name
}

func main() {
	fmt.Println(hostname, banner, retries)
}
