package main

import (
	"fmt"
	"os"
)

func init() {
	os.Setenv("FIXTURE_STAGE", "first")
}

func init() {
	fmt.Println("second init hook")
}

func main() {
	fmt.Println(os.Getenv("FIXTURE_STAGE"))
}
