package main

import "fmt"

func init() {
	fmt.Println("registering defaults")
}

func main() {
	fmt.Println("v1")
}
