package main

import "fmt"

func init() {
	fmt.Println("registering defaults")
}

func init() {
	fmt.Println("registering telemetry")
}

func main() {
	fmt.Println("v2")
}
